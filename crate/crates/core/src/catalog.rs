//! Named shapes shipped with the crate, and random shape generators.

use rand::Rng;

use crate::shape::{parse_shape, ShapeDocument, ShapeGraph, ShapeOptions};

macro_rules! shipped {
    ($($fn_name:ident => $file:literal, $doc:literal;)*) => {
        $(
            #[doc = $doc]
            pub fn $fn_name() -> ShapeGraph {
                parse_shape(include_str!(concat!("../shapes/", $file)))
                    .expect(concat!("shipped shape ", $file, " is valid"))
            }
        )*

        /// Names accepted by [`by_name`].
        pub const NAMES: &[&str] = &[$(stringify!($fn_name)),*];

        /// Looks up a shipped shape by its function name.
        pub fn by_name(name: &str) -> Option<ShapeGraph> {
            match name {
                $(stringify!($fn_name) => Some($fn_name()),)*
                _ => None,
            }
        }
    };
}

shipped! {
    single_edge => "single_edge.toml", "`u1 – v1`: t = 2, q = 1.";
    middle_path => "middle_path.toml", "`u1 – w1 – v1`: t = 3, z = 1, q = 1.";
    two_cover_bipartite => "two_cover_bipartite.toml", "Bipartite, |U| = 2, |V| = 3, four edges, q = 2.";
    seven_vertex => "seven_vertex.toml", "t = 7, z = 2, q = 2.";
    separator_example => "separator_example.toml", "t = 8, z = 3, q = 2.";
    shared_endpoint => "shared_endpoint.toml", "Intersection mode: U = [s], V = [s, v1], t = 3, r = 1.";
    fan => "fan.toml", "`v1 – u1 – v2`: t = 3, q = 1.";
}

/// Random bipartite shape with `1..=max_side` vertices on each side and
/// every `U`–`V` pair present with a per-shape random density.
pub fn random_bipartite<R: Rng>(rng: &mut R, max_side: usize) -> ShapeGraph {
    let x = rng.random_range(1..=max_side);
    let y = rng.random_range(1..=max_side);
    let density: f64 = rng.random_range(0.05..0.8);
    let u: Vec<String> = (1..=x).map(|i| format!("u{i}")).collect();
    let v: Vec<String> = (1..=y).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for a in &u {
        for b in &v {
            if rng.random_bool(density) {
                edges.push((a.clone(), b.clone()));
            }
        }
    }
    let doc = ShapeDocument {
        u,
        v,
        w: vec![],
        edges,
        intersection_mode: false,
    };
    ShapeGraph::from_document(&doc, &ShapeOptions::default())
        .expect("generated bipartite shape is valid")
}

/// Random shape with at most `max_t` vertices (`|U|, |V| ≥ 1`), random edges
/// anywhere, and every middle vertex given at least one edge.
pub fn random_shape<R: Rng>(rng: &mut R, max_t: usize) -> ShapeGraph {
    let max_t = max_t.max(2);
    let x = rng.random_range(1..=(max_t / 3).max(1));
    let y = rng.random_range(1..=(max_t / 3).max(1));
    let z = rng.random_range(0..=max_t - x - y);
    let u: Vec<String> = (1..=x).map(|i| format!("u{i}")).collect();
    let v: Vec<String> = (1..=y).map(|i| format!("v{i}")).collect();
    let w: Vec<String> = (1..=z).map(|i| format!("w{i}")).collect();
    let all: Vec<&String> = u.iter().chain(&v).chain(&w).collect();
    let t = all.len();
    let density: f64 = rng.random_range(0.1..0.5);
    let mut adj = vec![vec![false; t]; t];
    for i in 0..t {
        for j in (i + 1)..t {
            if rng.random_bool(density) {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    for i in (x + y)..t {
        if !adj[i].iter().any(|&b| b) {
            let mut j = rng.random_range(0..t - 1);
            if j >= i {
                j += 1;
            }
            adj[i][j] = true;
            adj[j][i] = true;
        }
    }
    let mut edges = Vec::new();
    for i in 0..t {
        for j in (i + 1)..t {
            if adj[i][j] {
                edges.push((all[i].clone(), all[j].clone()));
            }
        }
    }
    let doc = ShapeDocument {
        u,
        v,
        w,
        edges,
        intersection_mode: false,
    };
    ShapeGraph::from_document(&doc, &ShapeOptions::default()).expect("generated shape is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shipped_shapes_parse_with_expected_sizes() {
        assert_eq!(single_edge().t(), 2);
        assert_eq!(middle_path().z(), 1);
        assert_eq!(two_cover_bipartite().edges().len(), 4);
        let h = seven_vertex();
        assert_eq!((h.t(), h.z(), h.edges().len()), (7, 2, 7));
        let h = separator_example();
        assert_eq!((h.t(), h.z(), h.edges().len()), (8, 3, 7));
        let h = shared_endpoint();
        assert_eq!((h.t(), h.r(), h.z()), (3, 1, 1));
        for name in NAMES {
            assert!(by_name(name).is_some());
        }
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn generators_respect_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let h = random_bipartite(&mut rng, 8);
            assert!(h.is_bipartite_uv() && h.x() <= 8 && h.y() <= 8);
            let h = random_shape(&mut rng, 12);
            assert!(h.t() <= 12 && h.x() >= 1 && h.y() >= 1);
        }
    }
}
