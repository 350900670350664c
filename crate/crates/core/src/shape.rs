//! Shape graphs `H`: the templates whose embeddings into an input graph
//! define the entries of a graph matrix.
//!
//! A shape has three vertex lists: `U` (row vertices, ordered), `V`
//! (column vertices, ordered) and `W` (middle vertices). Internally every
//! vertex gets a dense id: `U` in listed order, then the vertices of `V`
//! that are not already in `U`, then `W`. All results that return vertex
//! sets use these ids, sorted ascending; ties between equally small covers
//! or separators are broken by taking the lexicographically smallest id
//! sequence.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_SHAPE_VERTICES: usize = 16;

/// On-disk shape description. Accepted as TOML or JSON.
///
/// ```toml
/// U = ["u1"]
/// V = ["v1"]
/// W = []
/// edges = [["u1", "v1"]]
/// intersection_mode = false
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeDocument {
    #[serde(rename = "U")]
    pub u: Vec<String>,
    #[serde(rename = "V")]
    pub v: Vec<String>,
    #[serde(rename = "W", default)]
    pub w: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub intersection_mode: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ShapeOptions {
    pub max_vertices: usize,
    /// Accept middle vertices of degree 0. Only sub-shapes built internally
    /// need this; shape documents must give every middle vertex an edge.
    pub allow_isolated_middle: bool,
}

impl Default for ShapeOptions {
    fn default() -> Self {
        ShapeOptions {
            max_vertices: DEFAULT_MAX_SHAPE_VERTICES,
            allow_isolated_middle: false,
        }
    }
}

/// A validated shape graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeGraph {
    names: Vec<String>,
    u: Vec<usize>,
    v: Vec<usize>,
    w: Vec<usize>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    intersection_mode: bool,
}

/// Parses a shape document (TOML, or JSON when the text starts with `{`)
/// with the default vertex cap.
pub fn parse_shape(text: &str) -> Result<ShapeGraph> {
    parse_shape_with(text, &ShapeOptions::default())
}

pub fn parse_shape_with(text: &str, options: &ShapeOptions) -> Result<ShapeGraph> {
    let doc: ShapeDocument = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::MalformedShape(e.to_string()))?
    } else {
        toml::from_str(text).map_err(|e| Error::MalformedShape(e.to_string()))?
    };
    ShapeGraph::from_document(&doc, options)
}

impl ShapeGraph {
    /// Convenience constructor for shapes with disjoint `U` and `V`.
    pub fn new(u: &[&str], v: &[&str], w: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        Self::build(u, v, w, edges, false)
    }

    /// Like [`ShapeGraph::new`] but allows names shared between `U` and `V`.
    pub fn with_intersection(
        u: &[&str],
        v: &[&str],
        w: &[&str],
        edges: &[(&str, &str)],
    ) -> Result<Self> {
        Self::build(u, v, w, edges, true)
    }

    fn build(
        u: &[&str],
        v: &[&str],
        w: &[&str],
        edges: &[(&str, &str)],
        intersection_mode: bool,
    ) -> Result<Self> {
        let owned = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let doc = ShapeDocument {
            u: owned(u),
            v: owned(v),
            w: owned(w),
            edges: edges
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            intersection_mode,
        };
        Self::from_document(&doc, &ShapeOptions::default())
    }

    pub fn from_document(doc: &ShapeDocument, options: &ShapeOptions) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();

        check_list("U", &doc.u)?;
        check_list("V", &doc.v)?;
        check_list("W", &doc.w)?;

        let mut u = Vec::with_capacity(doc.u.len());
        for name in &doc.u {
            index.insert(name.clone(), names.len());
            u.push(names.len());
            names.push(name.clone());
        }
        let mut v = Vec::with_capacity(doc.v.len());
        for name in &doc.v {
            match index.get(name) {
                Some(&id) => {
                    if !doc.intersection_mode {
                        return Err(Error::InvalidShape(format!(
                            "vertex '{name}' is in both U and V but intersection_mode is off"
                        )));
                    }
                    v.push(id);
                }
                None => {
                    index.insert(name.clone(), names.len());
                    v.push(names.len());
                    names.push(name.clone());
                }
            }
        }
        let mut w = Vec::with_capacity(doc.w.len());
        for name in &doc.w {
            if index.contains_key(name) {
                return Err(Error::InvalidShape(format!(
                    "duplicate vertex '{name}': W must be disjoint from U and V"
                )));
            }
            index.insert(name.clone(), names.len());
            w.push(names.len());
            names.push(name.clone());
        }

        let t = names.len();
        if t > options.max_vertices {
            return Err(Error::CapExceeded {
                what: "shape vertex count".into(),
                size: t as u128,
                cap: options.max_vertices as u128,
            });
        }

        let mut edge_set = BTreeSet::new();
        for (a, b) in &doc.edges {
            let ia = *index.get(a).ok_or_else(|| {
                Error::InvalidShape(format!("edge endpoint '{a}' is not a vertex"))
            })?;
            let ib = *index.get(b).ok_or_else(|| {
                Error::InvalidShape(format!("edge endpoint '{b}' is not a vertex"))
            })?;
            if ia == ib {
                return Err(Error::InvalidShape(format!("self-loop at '{a}'")));
            }
            if !edge_set.insert((ia.min(ib), ia.max(ib))) {
                return Err(Error::InvalidShape(format!(
                    "multi-edge between '{a}' and '{b}'"
                )));
            }
        }
        let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); t];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        for &id in &w {
            if adjacency[id].is_empty() && !options.allow_isolated_middle {
                return Err(Error::InvalidShape(format!(
                    "middle vertex '{}' has degree 0",
                    names[id]
                )));
            }
        }

        Ok(ShapeGraph {
            names,
            u,
            v,
            w,
            edges,
            adjacency,
            intersection_mode: doc.intersection_mode,
        })
    }

    pub fn to_document(&self) -> ShapeDocument {
        let names = |ids: &[usize]| ids.iter().map(|&i| self.names[i].clone()).collect();
        ShapeDocument {
            u: names(&self.u),
            v: names(&self.v),
            w: names(&self.w),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect(),
            intersection_mode: self.intersection_mode,
        }
    }

    /// Total number of vertices.
    pub fn t(&self) -> usize {
        self.names.len()
    }
    pub fn x(&self) -> usize {
        self.u.len()
    }
    pub fn y(&self) -> usize {
        self.v.len()
    }
    pub fn z(&self) -> usize {
        self.w.len()
    }
    /// `|U ∩ V|`; zero outside intersection mode.
    pub fn r(&self) -> usize {
        self.v.iter().filter(|&&id| id < self.u.len()).count()
    }
    pub fn u(&self) -> &[usize] {
        &self.u
    }
    pub fn v(&self) -> &[usize] {
        &self.v
    }
    pub fn w(&self) -> &[usize] {
        &self.w
    }
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
    pub fn neighbors(&self, id: usize) -> &[usize] {
        &self.adjacency[id]
    }
    pub fn degree(&self, id: usize) -> usize {
        self.adjacency[id].len()
    }
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }
    pub fn intersection_mode(&self) -> bool {
        self.intersection_mode
    }
    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
    pub fn ids_of(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.id_of(n)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown vertex '{n}'")))
            })
            .collect()
    }
    pub fn names_of(&self, ids: &[usize]) -> Vec<String> {
        ids.iter().map(|&i| self.names[i].clone()).collect()
    }

    pub fn in_u(&self, id: usize) -> bool {
        id < self.u.len()
    }
    pub fn in_v(&self, id: usize) -> bool {
        self.v.contains(&id)
    }
    pub fn in_w(&self, id: usize) -> bool {
        id >= self.t() - self.w.len()
    }
    /// Position of `id` within `U`, if it belongs to `U`.
    pub fn u_position(&self, id: usize) -> Option<usize> {
        (id < self.u.len()).then_some(id)
    }
    pub fn v_position(&self, id: usize) -> Option<usize> {
        self.v.iter().position(|&x| x == id)
    }
    pub fn w_position(&self, id: usize) -> Option<usize> {
        self.w.iter().position(|&x| x == id)
    }
    /// Vertices shared by `U` and `V`.
    pub fn shared(&self) -> Vec<usize> {
        self.v
            .iter()
            .copied()
            .filter(|&id| id < self.u.len())
            .collect()
    }

    /// True when `W` is empty, `U ∩ V = ∅` and every edge joins `U` to `V`.
    pub fn is_bipartite_uv(&self) -> bool {
        self.w.is_empty()
            && self.r() == 0
            && self
                .edges
                .iter()
                .all(|&(a, b)| (self.in_u(a) && self.in_v(b)) || (self.in_u(b) && self.in_v(a)))
    }

    /// True when every middle vertex has a path to `U ∪ V` (the connectivity
    /// hypothesis needed for the lower-bound scale).
    pub fn middle_vertices_reach_boundary(&self) -> bool {
        let mut seen = vec![false; self.t()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for id in 0..self.t() {
            if !self.in_w(id) {
                seen[id] = true;
                queue.push_back(id);
            }
        }
        while let Some(a) = queue.pop_front() {
            for &b in &self.adjacency[a] {
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Checks whether removing `set` leaves no path from `U \ set` to
    /// `V \ set`. A vertex of `U ∩ V` outside `set` is itself such a path.
    pub fn separates(&self, set: &[usize]) -> bool {
        let mut removed = vec![false; self.t()];
        for &s in set {
            if s < removed.len() {
                removed[s] = true;
            }
        }
        let mut seen = vec![false; self.t()];
        let mut queue = VecDeque::new();
        for &a in &self.u {
            if !removed[a] {
                seen[a] = true;
                queue.push_back(a);
            }
        }
        while let Some(a) = queue.pop_front() {
            if self.in_v(a) {
                return false;
            }
            for &b in &self.adjacency[a] {
                if !removed[b] && !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        true
    }

    /// True if every edge has an endpoint in `set`.
    pub fn covers(&self, set: &[usize]) -> bool {
        self.edges
            .iter()
            .all(|&(a, b)| set.contains(&a) || set.contains(&b))
    }

    fn require_bipartite(&self) -> Result<()> {
        if self.is_bipartite_uv() {
            Ok(())
        } else {
            Err(Error::NotBipartite(
                "W must be empty, U and V disjoint, and every edge must join U to V".into(),
            ))
        }
    }

    /// Maximum matching between `U` and `V` (Hopcroft–Karp), as `(u_id, v_id)` pairs.
    pub fn max_matching(&self) -> Result<Vec<(usize, usize)>> {
        self.require_bipartite()?;
        Ok(self.matching_avoiding(&[]))
    }

    fn matching_avoiding(&self, removed: &[usize]) -> Vec<(usize, usize)> {
        let x = self.x();
        let y = self.y();
        let mut left_adj = vec![Vec::new(); x];
        for (i, list) in left_adj.iter_mut().enumerate() {
            if removed.contains(&self.u[i]) {
                continue;
            }
            for &nb in &self.adjacency[self.u[i]] {
                if removed.contains(&nb) {
                    continue;
                }
                if let Some(j) = self.v_position(nb) {
                    list.push(j);
                }
            }
        }
        let matched = hopcroft_karp(&left_adj, y);
        matched
            .into_iter()
            .enumerate()
            .filter_map(|(i, m)| m.map(|j| (self.u[i], self.v[j])))
            .collect()
    }

    /// The vertex cover built from a maximum matching by alternating
    /// reachability: with `Z` the vertices reachable from unmatched `U`
    /// vertices along alternating paths, the cover is `(U \ Z) ∪ (V ∩ Z)`.
    pub fn konig_cover(&self) -> Result<Vec<usize>> {
        let matching = self.max_matching()?;
        let mut mate: Vec<Option<usize>> = vec![None; self.t()];
        for &(a, b) in &matching {
            mate[a] = Some(b);
            mate[b] = Some(a);
        }
        let mut reach = vec![false; self.t()];
        let mut queue = VecDeque::new();
        for &a in &self.u {
            if mate[a].is_none() {
                reach[a] = true;
                queue.push_back(a);
            }
        }
        while let Some(a) = queue.pop_front() {
            // `a` is in U; leave through non-matching edges, return through matching ones.
            for &b in &self.adjacency[a] {
                if mate[a] == Some(b) || reach[b] {
                    continue;
                }
                reach[b] = true;
                if let Some(next) = mate[b] {
                    if !reach[next] {
                        reach[next] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
        let mut cover: Vec<usize> = self
            .u
            .iter()
            .copied()
            .filter(|&a| !reach[a])
            .chain(self.v.iter().copied().filter(|&b| reach[b]))
            .collect();
        cover.sort_unstable();
        Ok(cover)
    }

    /// Minimum vertex cover of a bipartite shape. Its size equals the
    /// maximum matching size; among all minimum covers the lexicographically
    /// smallest id sequence is returned.
    pub fn min_vertex_cover(&self) -> Result<VertexCover> {
        self.require_bipartite()?;
        let q = self.matching_avoiding(&[]).len();
        let mut chosen: Vec<usize> = Vec::with_capacity(q);
        for id in 0..self.t() {
            if chosen.len() == q {
                break;
            }
            if self.degree(id) == 0 {
                continue;
            }
            chosen.push(id);
            let rest = self.matching_avoiding(&chosen).len();
            if rest + chosen.len() != q {
                chosen.pop();
            }
        }
        debug_assert!(self.covers(&chosen));
        Ok(VertexCover { q, cover: chosen })
    }

    /// Minimum `U`–`V` vertex separator together with a maximum system of
    /// vertex-disjoint `U`–`V` paths of the same cardinality.
    ///
    /// In intersection mode the shared vertices are forced into the
    /// separator and each contributes a zero-length path.
    pub fn min_separator(&self) -> SeparatorResult {
        let shared = self.shared();
        let sources: Vec<usize> = self
            .u
            .iter()
            .copied()
            .filter(|id| !shared.contains(id))
            .collect();
        let sinks: Vec<usize> = self
            .v
            .iter()
            .copied()
            .filter(|id| !shared.contains(id))
            .collect();

        let mut network = VertexFlow::new(self, &shared, &sources, &sinks);
        let flow = network.max_flow();
        let mut paths: Vec<Vec<usize>> = shared.iter().map(|&s| vec![s]).collect();
        paths.extend(network.paths(self, &sources, &sinks));

        let mut chosen: Vec<usize> = Vec::new();
        let mut removed = shared.clone();
        for id in 0..self.t() {
            if chosen.len() == flow {
                break;
            }
            if shared.contains(&id) {
                continue;
            }
            removed.push(id);
            let rest = VertexFlow::new(self, &removed, &sources, &sinks).max_flow();
            if rest + chosen.len() + 1 == flow {
                chosen.push(id);
            } else {
                removed.pop();
            }
        }
        let mut separator: Vec<usize> = shared.iter().copied().chain(chosen).collect();
        separator.sort_unstable();
        paths.sort();
        let path_lengths = paths.iter().map(|p| p.len() - 1).collect();
        SeparatorResult {
            q: separator.len(),
            separator,
            disjoint_paths: paths,
            path_lengths,
        }
    }

    /// Maximum-cardinality set of pairwise vertex-disjoint `U`–`V` paths,
    /// each with its internal vertices in `W`.
    pub fn max_disjoint_paths(&self) -> Vec<Vec<usize>> {
        self.min_separator().disjoint_paths
    }

    /// Separator size `q` (for any shape) without materializing paths.
    pub fn separator_size(&self) -> usize {
        let shared = self.shared();
        let sources: Vec<usize> = self
            .u
            .iter()
            .copied()
            .filter(|id| !shared.contains(id))
            .collect();
        let sinks: Vec<usize> = self
            .v
            .iter()
            .copied()
            .filter(|id| !shared.contains(id))
            .collect();
        shared.len() + VertexFlow::new(self, &shared, &sources, &sinks).max_flow()
    }
}

fn check_list(label: &str, names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for name in names {
        if name.is_empty() {
            return Err(Error::MalformedShape(format!(
                "empty vertex name in {label}"
            )));
        }
        if !seen.insert(name) {
            return Err(Error::InvalidShape(format!(
                "duplicate vertex '{name}' in {label}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCover {
    pub q: usize,
    pub cover: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatorResult {
    pub q: usize,
    pub separator: Vec<usize>,
    pub disjoint_paths: Vec<Vec<usize>>,
    /// Number of edges on each path, aligned with `disjoint_paths`.
    pub path_lengths: Vec<usize>,
}

/// Hopcroft–Karp on a left-indexed adjacency list. Returns the mate of each
/// left vertex.
fn hopcroft_karp(left_adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    let left = left_adj.len();
    let mut mate_left = vec![FREE; left];
    let mut mate_right = vec![FREE; right];
    let mut dist = vec![0usize; left];

    loop {
        // BFS layering from free left vertices.
        let mut queue = VecDeque::new();
        for i in 0..left {
            if mate_left[i] == FREE {
                dist[i] = 0;
                queue.push_back(i);
            } else {
                dist[i] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(i) = queue.pop_front() {
            for &j in &left_adj[i] {
                let k = mate_right[j];
                if k == FREE {
                    found = true;
                } else if dist[k] == usize::MAX {
                    dist[k] = dist[i] + 1;
                    queue.push_back(k);
                }
            }
        }
        if !found {
            break;
        }
        let mut augmented = false;
        for i in 0..left {
            if mate_left[i] == FREE
                && augment(i, left_adj, &mut mate_left, &mut mate_right, &mut dist)
            {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }
    mate_left
        .into_iter()
        .map(|m| (m != FREE).then_some(m))
        .collect()
}

fn augment(
    i: usize,
    left_adj: &[Vec<usize>],
    mate_left: &mut [usize],
    mate_right: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &j in &left_adj[i] {
        let k = mate_right[j];
        let ok = k == usize::MAX
            || (dist[k] == dist[i].wrapping_add(1)
                && augment(k, left_adj, mate_left, mate_right, dist));
        if ok {
            mate_left[i] = j;
            mate_right[j] = i;
            return true;
        }
    }
    dist[i] = usize::MAX;
    false
}

/// Unit vertex-capacity flow network: every vertex `v` is split into
/// `in(v) = 2v` and `out(v) = 2v + 1` joined by a capacity-1 arc; the
/// source feeds `in(u)` for sources `u` and `out(v)` drains to the sink for
/// sinks `v`, so a direct `U`–`V` edge still costs one endpoint.
struct VertexFlow {
    source: usize,
    sink: usize,
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i32>,
    flow_arcs: Vec<bool>,
}

impl VertexFlow {
    fn new(shape: &ShapeGraph, removed: &[usize], sources: &[usize], sinks: &[usize]) -> Self {
        let t = shape.t();
        let mut net = VertexFlow {
            source: 2 * t,
            sink: 2 * t + 1,
            head: vec![Vec::new(); 2 * t + 2],
            to: Vec::new(),
            cap: Vec::new(),
            flow_arcs: Vec::new(),
        };
        let live = |v: usize| !removed.contains(&v);
        for v in (0..t).filter(|&v| live(v)) {
            net.arc(2 * v, 2 * v + 1, 1);
        }
        for &(a, b) in shape.edges() {
            if live(a) && live(b) {
                net.arc(2 * a + 1, 2 * b, 1);
                net.arc(2 * b + 1, 2 * a, 1);
            }
        }
        for &s in sources.iter().filter(|&&s| live(s)) {
            net.arc(net.source, 2 * s, 1);
        }
        for &s in sinks.iter().filter(|&&s| live(s)) {
            net.arc(2 * s + 1, net.sink, 1);
        }
        net
    }

    fn arc(&mut self, from: usize, to: usize, cap: i32) {
        self.head[from].push(self.to.len());
        self.to.push(to);
        self.cap.push(cap);
        self.flow_arcs.push(true);
        self.head[to].push(self.to.len());
        self.to.push(from);
        self.cap.push(0);
        self.flow_arcs.push(false);
    }

    /// Edmonds–Karp augmentation; capacities are unit so each BFS adds one.
    fn max_flow(&mut self) -> usize {
        let nodes = self.head.len();
        let mut total = 0;
        loop {
            let mut parent_arc = vec![usize::MAX; nodes];
            let mut seen = vec![false; nodes];
            seen[self.source] = true;
            let mut queue = VecDeque::from([self.source]);
            while let Some(a) = queue.pop_front() {
                if a == self.sink {
                    break;
                }
                for &e in &self.head[a] {
                    let b = self.to[e];
                    if self.cap[e] > 0 && !seen[b] {
                        seen[b] = true;
                        parent_arc[b] = e;
                        queue.push_back(b);
                    }
                }
            }
            if !seen[self.sink] {
                return total;
            }
            let mut node = self.sink;
            while node != self.source {
                let e = parent_arc[node];
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                node = self.to[e ^ 1];
            }
            total += 1;
        }
    }

    /// Decomposes the current flow into vertex paths, each trimmed to start
    /// at its last source vertex and end at the first sink vertex after it.
    fn paths(&self, shape: &ShapeGraph, sources: &[usize], sinks: &[usize]) -> Vec<Vec<usize>> {
        // Flow on a forward arc equals the capacity now sitting on its reverse.
        let mut remaining: Vec<i32> = (0..self.to.len())
            .map(|e| {
                if self.flow_arcs[e] {
                    self.cap[e ^ 1]
                } else {
                    0
                }
            })
            .collect();
        let t = shape.t();
        let mut out = Vec::new();
        loop {
            let mut node = self.source;
            let mut walk: Vec<usize> = Vec::new();
            let mut progressed = false;
            while node != self.sink {
                let next = self.head[node]
                    .iter()
                    .copied()
                    .find(|&e| self.flow_arcs[e] && remaining[e] > 0);
                let Some(e) = next else { break };
                remaining[e] -= 1;
                progressed = true;
                node = self.to[e];
                if node < 2 * t && node % 2 == 0 {
                    walk.push(node / 2);
                }
            }
            if !progressed || node != self.sink {
                break;
            }
            let start = walk.iter().rposition(|v| sources.contains(v)).unwrap_or(0);
            let end = start
                + walk[start..]
                    .iter()
                    .position(|v| sinks.contains(v))
                    .unwrap_or(walk.len() - 1 - start);
            out.push(walk[start..=end].to_vec());
        }
        out
    }
}
