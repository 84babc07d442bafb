use std::path::Path;

use indexmap::IndexMap;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gauss::{Component, End, Flavor, GaussDiagram, Role};

pub const BUILTIN: &str = include_str!("../data/catalog.txt");

/// Named diagrams, in file order.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    pub entries: IndexMap<String, GaussDiagram>,
}

impl Catalog {
    /// Lines `name = code`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Catalog> {
        let mut entries = IndexMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, code) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `name = code`", i + 1)))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::Parse(format!("line {}: empty name", i + 1)));
            }
            let d = GaussDiagram::parse(code.trim()).map_err(|e| Error::Parse(format!("line {} ({name}): {e}", i + 1)))?;
            if entries.insert(name.to_string(), d).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate name {name}", i + 1)));
            }
        }
        Ok(Catalog { entries })
    }

    pub fn builtin() -> Catalog {
        Catalog::parse(BUILTIN).expect("builtin catalog parses")
    }

    pub fn load(path: &Path) -> Result<Catalog> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Catalog::parse(&text)
    }

    pub fn get(&self, name: &str) -> Option<&GaussDiagram> {
        self.entries.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &GaussDiagram)> {
        self.entries.iter()
    }
}

/// Closure of a braid on `strands` strands. Generator k > 0 crosses strand k over strand
/// k + 1 (a positive crossing), -k the inverse. Returns None if the closure is not a knot.
pub fn braid_closure(strands: usize, word: &[i32]) -> Option<GaussDiagram> {
    let mut at: Vec<usize> = (0..strands).collect();
    let mut passes: Vec<Vec<End>> = vec![Vec::new(); strands];
    let mut signs = Vec::new();
    for (c, &g) in word.iter().enumerate() {
        let k = g.unsigned_abs() as usize;
        if k == 0 || k >= strands {
            return None;
        }
        let (left, right) = (at[k - 1], at[k]);
        let (over, under) = if g > 0 { (left, right) } else { (right, left) };
        passes[over].push(End::new(c, Role::Tail));
        passes[under].push(End::new(c, Role::Head));
        signs.push(g.signum() as i8);
        at.swap(k - 1, k);
    }
    // the thread ending at position p continues as the thread starting at p
    let mut next = vec![0; strands];
    for (p, &t) in at.iter().enumerate() {
        next[t] = p;
    }
    let mut slots = Vec::new();
    let mut t = 0;
    for _ in 0..strands {
        slots.extend_from_slice(&passes[t]);
        t = next[t];
    }
    if t != 0 || (1..strands).any(|k| (0..k).fold(0, |x, _| next[x]) == 0) {
        return None;
    }
    GaussDiagram::new(Flavor::Virtual, vec![Component::closed(slots)], signs).ok().map(|(d, _)| d)
}

/// A random closed braid knot with between 1 and `max_crossings` crossings, hence planar.
pub fn random_planar_knot(rng: &mut impl Rng, max_crossings: usize) -> GaussDiagram {
    loop {
        if max_crossings == 0 {
            return GaussDiagram::unknot();
        }
        let strands = rng.gen_range(2..=4usize);
        let len = rng.gen_range(1..=max_crossings);
        let word: Vec<i32> = (0..len)
            .map(|_| {
                let k = rng.gen_range(1..strands) as i32;
                if rng.gen_bool(0.5) {
                    k
                } else {
                    -k
                }
            })
            .collect();
        if let Some(d) = braid_closure(strands, &word) {
            return d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::genus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtin_parses() {
        let c = Catalog::builtin();
        assert!(c.get("3.1").is_some());
        assert_eq!(c.get("unknot").unwrap().n_chords(), 0);
        assert_eq!(c.get("hopf_pos").unwrap().n_components(), 2);
        assert_eq!(c.get("flat_3_1").unwrap().flavor(), Flavor::Flat);
        for name in ["trefoil", "trefoil_left", "figure_eight", "kink_pos", "hopf_pos"] {
            assert_eq!(genus(c.get(name).unwrap()), 0, "{name}");
        }
        for name in ["virtual_trefoil", "3.1"] {
            assert!(genus(c.get(name).unwrap()) > 0, "{name}");
        }
    }

    #[test]
    fn parse_errors() {
        assert!(Catalog::parse("x").is_err());
        assert!(Catalog::parse("a = c: O1+").is_err());
        assert!(Catalog::parse("a = c:\na = c:").is_err());
        assert_eq!(Catalog::parse("# nothing\n\n").unwrap().entries.len(), 0);
    }

    #[test]
    fn braids() {
        let t = braid_closure(2, &[1, 1, 1]).unwrap();
        assert_eq!(t.n_chords(), 3);
        assert_eq!(genus(&t), 0);
        assert!(t.signs().iter().all(|&s| s == 1));
        assert!(braid_closure(2, &[1, 1]).is_none());
        assert!(braid_closure(3, &[1, -2, 1, -2]).is_some());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let d = random_planar_knot(&mut rng, 8);
            assert!(d.n_chords() <= 8);
            assert_eq!(d.n_components(), 1);
            assert_eq!(genus(&d), 0, "{d}");
        }
    }
}
