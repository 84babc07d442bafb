use chordal::catalog::Catalog;
use chordal::moves::random_walk;
use chordal::GaussDiagram;

/// The last diagram of a seeded walk from knot 3.1 that reaches `crossings` crossings.
pub fn walk_diagram(crossings: usize, seed: u64) -> GaussDiagram {
    let start = Catalog::builtin().get("3.1").unwrap().clone();
    random_walk(&start, 2000, seed, crossings)
        .into_iter()
        .map(|s| s.diagram)
        .find(|d| d.n_chords() == crossings)
        .unwrap_or(start)
}
