//! Unweighted directed graphs with loops, no parallel arcs.
//!
//! Vertices are `0..n`. Out-neighbour lists are kept sorted so that two
//! graphs with the same arc set compare equal regardless of insertion order.

use std::fmt;

use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("duplicate arc {0} -> {1}")]
    DuplicateArc(Vertex, Vertex),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<Vec<Vertex>>,
    arc_count: usize,
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Digraph")
            .field("n", &self.n())
            .field("arcs", &self.arcs().collect::<Vec<_>>())
            .finish()
    }
}

impl Digraph {
    /// Graph on `n` vertices with no arcs.
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(Self {
            out: vec![Vec::new(); n],
            arc_count: 0,
        })
    }

    /// Builds a graph from an arc list, rejecting duplicates.
    pub fn from_arcs(
        n: usize,
        arcs: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::new(n)?;
        for (u, v) in arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    /// Decodes a row-major adjacency bitmask: bit `u * n + v` set means `u -> v`.
    pub fn from_bitmask(n: usize, mask: u64) -> Result<Self, GraphError> {
        assert!(n * n <= 64, "bitmask encoding limited to n <= 8");
        let mut g = Self::new(n)?;
        for bit in 0..n * n {
            if mask >> bit & 1 == 1 {
                g.add_arc(bit / n, bit % n)?;
            }
        }
        Ok(g)
    }

    pub fn add_arc(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let list = &mut self.out[u];
        match list.binary_search(&v) {
            Ok(_) => Err(GraphError::DuplicateArc(u, v)),
            Err(pos) => {
                list.insert(pos, v);
                self.arc_count += 1;
                Ok(())
            }
        }
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.out.len()
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.out[u].binary_search(&v).is_ok()
    }

    /// Number of arcs leaving `u`; a loop counts once.
    pub fn out_degree(&self, u: Vertex) -> Result<usize, GraphError> {
        self.check_vertex(u)?;
        Ok(self.out[u].len())
    }

    /// Sorted out-neighbours of `u`. Panics if `u` is out of range.
    #[inline]
    pub fn out_neighbors(&self, u: Vertex) -> &[Vertex] {
        &self.out[u]
    }

    /// All arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    /// Row-major adjacency bitmask, the inverse of [`Digraph::from_bitmask`].
    pub fn bitmask(&self) -> Option<u64> {
        let n = self.n();
        if n * n > 64 {
            return None;
        }
        Some(self.arcs().fold(0u64, |m, (u, v)| m | 1 << (u * n + v)))
    }

    /// Row-major adjacency as a string of `0`/`1`, one character per cell.
    pub fn adjacency_bits(&self) -> String {
        let n = self.n();
        let mut s = vec![b'0'; n * n];
        for (u, v) in self.arcs() {
            s[u * n + v] = b'1';
        }
        String::from_utf8(s).expect("ascii")
    }

    pub fn is_weakly_connected(&self) -> bool {
        let n = self.n();
        let mut undirected = vec![Vec::new(); n];
        for (u, v) in self.arcs() {
            if u != v {
                undirected[u].push(v);
                undirected[v].push(u);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = stack.pop() {
            for &w in &undirected[u] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == n
    }

    pub fn scc_report(&self) -> SccReport {
        let components = tarjan(self);
        let mut component_of = vec![0; self.n()];
        for (c, members) in components.iter().enumerate() {
            for &v in members {
                component_of[v] = c;
            }
        }
        let sink = components
            .iter()
            .enumerate()
            .map(|(c, members)| {
                members
                    .iter()
                    .all(|&u| self.out[u].iter().all(|&w| component_of[w] == c))
            })
            .collect();
        let aperiodic = components
            .iter()
            .enumerate()
            .map(|(c, members)| component_period(self, members, &component_of, c) == 1)
            .collect();
        SccReport {
            components,
            component_of,
            sink,
            aperiodic,
        }
    }

    /// Which of the three conditions for a well-defined α = 1 limit fails, if any.
    pub fn alpha1_violation(&self) -> Option<Alpha1Violation> {
        if !self.is_weakly_connected() {
            return Some(Alpha1Violation::NotWeaklyConnected);
        }
        let report = self.scc_report();
        let sinks: Vec<usize> = report.sink_components().collect();
        if sinks.len() != 1 {
            return Some(Alpha1Violation::SinkCount(sinks.len()));
        }
        if !report.aperiodic[sinks[0]] {
            return Some(Alpha1Violation::PeriodicSink);
        }
        None
    }

    pub fn alpha1_valid(&self) -> bool {
        self.alpha1_violation().is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Alpha1Violation {
    #[error("graph is not weakly connected")]
    NotWeaklyConnected,
    #[error("graph has {0} sink strongly connected components, expected exactly one")]
    SinkCount(usize),
    #[error("the sink strongly connected component is periodic")]
    PeriodicSink,
}

/// Strongly connected components with sink and aperiodicity flags.
#[derive(Debug, Clone)]
pub struct SccReport {
    pub components: Vec<Vec<Vertex>>,
    pub component_of: Vec<usize>,
    pub sink: Vec<bool>,
    pub aperiodic: Vec<bool>,
}

impl SccReport {
    pub fn sink_components(&self) -> impl Iterator<Item = usize> + '_ {
        self.sink
            .iter()
            .enumerate()
            .filter_map(|(c, &s)| s.then_some(c))
    }
}

// Iterative Tarjan; components come out in reverse topological order.
fn tarjan(g: &Digraph) -> Vec<Vec<Vertex>> {
    const UNSEEN: usize = usize::MAX;
    let n = g.n();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;
    // (vertex, position in its neighbour list)
    let mut call: Vec<(Vertex, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = g.out[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period (gcd of cycle lengths) of one strongly connected component, or 0 if
/// the component contains no cycle at all.
fn component_period(g: &Digraph, members: &[Vertex], component_of: &[usize], c: usize) -> usize {
    if members.iter().any(|&u| g.has_arc(u, u)) {
        return 1;
    }
    let mut level = vec![usize::MAX; g.n()];
    let root = members[0];
    level[root] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &w in &g.out[u] {
            if component_of[w] == c && level[w] == usize::MAX {
                level[w] = level[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut period = 0;
    for &u in members {
        for &w in &g.out[u] {
            if component_of[w] == c {
                period = gcd(period, (level[u] + 1).abs_diff(level[w]));
            }
        }
    }
    period
}

/// Parses the text format: first significant line is `n`, then one `u v` arc
/// per line. Blank lines and lines starting with `#` are ignored.
pub fn parse_graph(text: &str) -> Result<Digraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (first, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        message: "missing vertex count".into(),
    })?;
    let n: usize = header.parse().map_err(|_| GraphError::Parse {
        line: first,
        message: format!("expected vertex count, found {header:?}"),
    })?;
    let mut g = Digraph::new(n).map_err(|e| GraphError::Parse {
        line: first,
        message: e.to_string(),
    })?;

    for (line, body) in lines {
        let parse_err = |message: String| GraphError::Parse { line, message };
        let mut fields = body.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!("expected \"u v\", found {body:?}")));
        };
        let u: Vertex = a
            .parse()
            .map_err(|_| parse_err(format!("invalid vertex {a:?}")))?;
        let v: Vertex = b
            .parse()
            .map_err(|_| parse_err(format!("invalid vertex {b:?}")))?;
        g.add_arc(u, v).map_err(|e| parse_err(e.to_string()))?;
    }
    Ok(g)
}

pub fn serialize_graph(g: &Digraph) -> String {
    let mut s = format!("{}\n", g.n());
    for (u, v) in g.arcs() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}
