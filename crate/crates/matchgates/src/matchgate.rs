//! Plane weighted graphs with ordered external nodes, brute-force perfect
//! matching sums, signature extraction, and the gadget surgeries used by
//! the decomposition constructions.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bits;
use crate::planar::{self, PlanarError, Rotation};
use crate::scalar::Scalar;
use crate::signature::BooleanSignature;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GateError {
    #[error("vertex {0} is out of range")]
    InvalidVertex(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edge between {0} and {1}; merge parallel edges by summing their weights")]
    ParallelEdge(usize, usize),
    #[error("external nodes must be distinct")]
    DuplicateExternal,
    #[error("vertex {0} is not an external node")]
    NotExternal(usize),
    #[error("vertex {0} is paired more than once")]
    DuplicatePairing(usize),
    #[error("graph has more than {0} vertices; the brute-force matcher uses word-sized masks")]
    TooManyVertices(usize),
    #[error("embedding error: {0}")]
    Planar(#[from] PlanarError),
    #[error("gate has no rotation system; this operation needs an embedding")]
    MissingRotation,
    #[error("format error: {0}")]
    Format(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Scalar,
}

/// Which node keeps the external slot after a pendant is attached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PendantMode {
    /// The new leaf takes over the external slot; the old node goes internal.
    Transfer,
    /// Both the old node and the leaf become internal; the arity drops.
    Revoke,
}

/// Which end of an attached length-2 path stays external.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathEnd {
    /// The far endpoint replaces the original node in the external list.
    Far,
    /// The original node keeps its slot; the path dangles internally.
    Near,
}

/// A weighted graph with an ordered list of external nodes and an optional
/// counterclockwise rotation system. Immutable; surgeries return new gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matchgate {
    vertex_count: usize,
    edges: Vec<Edge>,
    externals: Vec<usize>,
    rotation: Option<Rotation>,
}

const MAX_VERTICES: usize = 64;

impl Matchgate {
    pub fn new(
        vertex_count: usize,
        edges: Vec<Edge>,
        externals: Vec<usize>,
        rotation: Option<Rotation>,
    ) -> Result<Self, GateError> {
        if vertex_count > MAX_VERTICES {
            return Err(GateError::TooManyVertices(MAX_VERTICES));
        }
        let mut seen = HashSet::new();
        for e in &edges {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(GateError::InvalidVertex(e.u.max(e.v)));
            }
            if e.u == e.v {
                return Err(GateError::SelfLoop(e.u));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(GateError::ParallelEdge(e.u, e.v));
            }
        }
        let mut ext_seen = HashSet::new();
        for &x in &externals {
            if x >= vertex_count {
                return Err(GateError::InvalidVertex(x));
            }
            if !ext_seen.insert(x) {
                return Err(GateError::DuplicateExternal);
            }
        }
        if let Some(rot) = &rotation {
            if rot.vertices() != vertex_count {
                return Err(GateError::InvalidVertex(rot.vertices()));
            }
            let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.u, e.v)).collect();
            rot.validate(&pairs)?;
        }
        Ok(Matchgate {
            vertex_count,
            edges,
            externals,
            rotation,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn externals(&self) -> &[usize] {
        &self.externals
    }

    pub fn arity(&self) -> usize {
        self.externals.len()
    }

    pub fn rotation(&self) -> Option<&Rotation> {
        self.rotation.as_ref()
    }

    /// True when the vertex count is even; even gates carry even-parity
    /// signatures and odd gates odd-parity ones.
    pub fn is_even(&self) -> bool {
        self.vertex_count % 2 == 0
    }

    pub fn with_externals(&self, externals: Vec<usize>) -> Result<Matchgate, GateError> {
        Matchgate::new(
            self.vertex_count,
            self.edges.clone(),
            externals,
            self.rotation.clone(),
        )
    }

    fn adjacency(&self) -> Vec<Vec<(usize, Scalar)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.u].push((e.v, e.weight.clone()));
            adj[e.v].push((e.u, e.weight.clone()));
        }
        adj
    }

    /// Component id per vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.vertex_count];
        let adj = self.adjacency();
        let mut next = 0;
        for start in 0..self.vertex_count {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = next;
            while let Some(v) = stack.pop() {
                for (n, _) in &adj[v] {
                    if comp[*n] == usize::MAX {
                        comp[*n] = next;
                        stack.push(*n);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    /// Sum over perfect matchings of the edge-weight products, with the
    /// vertices in `removed` treated as deleted. The empty graph counts 1.
    /// Backtracks on the lowest unmatched vertex; practical up to roughly
    /// 24 live vertices.
    pub fn perfmatch_without(&self, removed: u64) -> Scalar {
        let adj = self.adjacency();
        fn recurse(adj: &[Vec<(usize, Scalar)>], used: u64, from: usize) -> Scalar {
            let n = adj.len();
            let mut v = from;
            while v < n && used & (1 << v) != 0 {
                v += 1;
            }
            if v == n {
                return Scalar::one();
            }
            let mut total = Scalar::zero();
            for (nbr, w) in &adj[v] {
                if used & (1 << *nbr) != 0 {
                    continue;
                }
                let sub = recurse(adj, used | (1 << v) | (1 << *nbr), v + 1);
                if !sub.is_zero() {
                    total += w * &sub;
                }
            }
            total
        }
        recurse(&adj, removed, 0)
    }

    /// PerfMatch of the whole gate graph.
    pub fn perfmatch(&self) -> Scalar {
        self.perfmatch_without(0)
    }

    /// One structural perfect matching of the graph minus `removed`, if any.
    pub fn find_perfect_matching(&self, removed: u64) -> Option<Vec<(usize, usize)>> {
        let adj = self.adjacency();
        fn recurse(
            adj: &[Vec<(usize, Scalar)>],
            used: u64,
            from: usize,
            picked: &mut Vec<(usize, usize)>,
        ) -> bool {
            let n = adj.len();
            let mut v = from;
            while v < n && used & (1 << v) != 0 {
                v += 1;
            }
            if v == n {
                return true;
            }
            for (nbr, _) in &adj[v] {
                if used & (1 << *nbr) != 0 {
                    continue;
                }
                picked.push((v, *nbr));
                if recurse(adj, used | (1 << v) | (1 << *nbr), v + 1, picked) {
                    return true;
                }
                picked.pop();
            }
            false
        }
        let mut picked = Vec::new();
        recurse(&adj, removed, 0, &mut picked).then_some(picked)
    }

    fn removal_mask(&self, alpha: usize) -> u64 {
        let n = self.arity();
        let mut mask = 0u64;
        for (slot, &vertex) in self.externals.iter().enumerate() {
            if bits::get_bit(alpha, slot + 1, n) {
                mask |= 1 << vertex;
            }
        }
        mask
    }

    /// The gate signature: entry `α` is PerfMatch of the graph with the
    /// external nodes selected by the 1-bits of `α` deleted.
    pub fn signature(&self) -> BooleanSignature {
        let n = self.arity();
        assert!(n <= 24, "dense signature bound: arity {n} > 24");
        let mut values = Vec::with_capacity(1 << n);
        for alpha in 0..1usize << n {
            values.push(self.perfmatch_without(self.removal_mask(alpha)));
        }
        BooleanSignature::new(n, values).expect("length matches arity")
    }

    /// The face holding the external nodes, when the gate is embedded.
    fn external_corner(&self, v: usize) -> Result<usize, GateError> {
        let rot = self.rotation.as_ref().ok_or(GateError::MissingRotation)?;
        let faces = planar::trace_faces(rot);
        let face = planar::common_face(&faces, &self.externals)
            .or_else(|| faces.iter().find(|f| f.touches(v)))
            .ok_or(GateError::Planar(PlanarError::MissingVertex(v)))?;
        planar::corner_slot(face, v).ok_or(GateError::Planar(PlanarError::MissingVertex(v)))
    }

    /// Attaches a weight-`w` pendant edge at external node `v`.
    pub fn attach_pendant(
        &self,
        v: usize,
        weight: Scalar,
        mode: PendantMode,
    ) -> Result<Matchgate, GateError> {
        let slot = self
            .externals
            .iter()
            .position(|&x| x == v)
            .ok_or(GateError::NotExternal(v))?;
        let leaf = self.vertex_count;
        let mut edges = self.edges.clone();
        edges.push(Edge {
            u: v,
            v: leaf,
            weight,
        });
        let mut externals = self.externals.clone();
        match mode {
            PendantMode::Transfer => externals[slot] = leaf,
            PendantMode::Revoke => {
                externals.remove(slot);
            }
        }
        let rotation = match &self.rotation {
            None => None,
            Some(rot) => {
                let after = self.external_corner(v)?;
                let mut rot = rot.clone();
                rot.order.push(vec![v]);
                if rot.order[v].is_empty() {
                    rot.order[v].push(leaf);
                } else {
                    rot.insert_after(v, after, leaf);
                }
                Some(rot)
            }
        };
        Matchgate::new(self.vertex_count + 1, edges, externals, rotation)
    }

    /// Attaches a length-2 path `v — m — t` with weights `(w1, w2)` at
    /// external node `v`.
    pub fn attach_path2(
        &self,
        v: usize,
        w1: Scalar,
        w2: Scalar,
        end: PathEnd,
    ) -> Result<Matchgate, GateError> {
        let slot = self
            .externals
            .iter()
            .position(|&x| x == v)
            .ok_or(GateError::NotExternal(v))?;
        let mid = self.vertex_count;
        let tip = self.vertex_count + 1;
        let mut edges = self.edges.clone();
        edges.push(Edge {
            u: v,
            v: mid,
            weight: w1,
        });
        edges.push(Edge {
            u: mid,
            v: tip,
            weight: w2,
        });
        let mut externals = self.externals.clone();
        if end == PathEnd::Far {
            externals[slot] = tip;
        }
        let rotation = match &self.rotation {
            None => None,
            Some(rot) => {
                let after = self.external_corner(v)?;
                let mut rot = rot.clone();
                rot.order.push(vec![v, tip]);
                rot.order.push(vec![mid]);
                if rot.order[v].is_empty() {
                    rot.order[v].push(mid);
                } else {
                    rot.insert_after(v, after, mid);
                }
                Some(rot)
            }
        };
        Matchgate::new(self.vertex_count + 2, edges, externals, rotation)
    }

    /// Removes a vertex and its incident edges; later vertex ids shift down.
    pub fn remove_vertex(&self, target: usize) -> Result<Matchgate, GateError> {
        if target >= self.vertex_count {
            return Err(GateError::InvalidVertex(target));
        }
        let shift = |x: usize| if x > target { x - 1 } else { x };
        let edges = self
            .edges
            .iter()
            .filter(|e| e.u != target && e.v != target)
            .map(|e| Edge {
                u: shift(e.u),
                v: shift(e.v),
                weight: e.weight.clone(),
            })
            .collect();
        let externals = self
            .externals
            .iter()
            .filter(|&&x| x != target)
            .map(|&x| shift(x))
            .collect();
        let rotation = self.rotation.as_ref().map(|rot| {
            let mut order: Vec<Vec<usize>> = rot.order.clone();
            order.remove(target);
            for ring in &mut order {
                ring.retain(|&n| n != target);
                for n in ring.iter_mut() {
                    *n = shift(*n);
                }
            }
            Rotation::new(order)
        });
        Matchgate::new(self.vertex_count - 1, edges, externals, rotation)
    }

    /// Checks `V − E + F = 2` on every connected component of the embedding.
    pub fn validate_planarity(&self) -> Result<(), GateError> {
        let rot = self.rotation.as_ref().ok_or(GateError::MissingRotation)?;
        let comp = self.components();
        let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut v_count = vec![0usize; ncomp];
        let mut e_count = vec![0usize; ncomp];
        let mut f_count = vec![0usize; ncomp];
        for c in comp.iter().copied() {
            v_count[c] += 1;
        }
        for e in &self.edges {
            e_count[comp[e.u]] += 1;
        }
        for face in planar::trace_faces(rot) {
            f_count[comp[face.boundary[0].0]] += 1;
        }
        for c in 0..ncomp {
            let f = f_count[c].max(1);
            if v_count[c] + f != e_count[c] + 2 {
                return Err(GateError::Planar(PlanarError::NotPlanar {
                    v: v_count[c],
                    e: e_count[c],
                    f,
                }));
            }
        }
        Ok(())
    }

    /// Text format: `nodes <k>`, `edge <u> <v> <scalar>`, `external <v…>`,
    /// optional `rot <v>: <neighbors ccw>`. Vertex ids are 1-based.
    pub fn parse_text(text: &str) -> Result<Self, GateError> {
        let mut vertex_count: Option<usize> = None;
        let mut edges = Vec::new();
        let mut externals = Vec::new();
        let mut rot_lines: Vec<(usize, Vec<usize>)> = Vec::new();
        let bad = |lineno: usize, msg: String| GateError::Format(format!("line {lineno}: {msg}"));
        for (k, raw) in text.lines().enumerate() {
            let lineno = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            match tokens.next().unwrap() {
                "nodes" => {
                    let n: usize = tokens
                        .next()
                        .ok_or_else(|| bad(lineno, "missing count".into()))?
                        .parse()
                        .map_err(|e| bad(lineno, format!("{e}")))?;
                    vertex_count = Some(n);
                }
                "edge" => {
                    let u: usize = tokens
                        .next()
                        .ok_or_else(|| bad(lineno, "missing endpoint".into()))?
                        .parse()
                        .map_err(|e| bad(lineno, format!("{e}")))?;
                    let v: usize = tokens
                        .next()
                        .ok_or_else(|| bad(lineno, "missing endpoint".into()))?
                        .parse()
                        .map_err(|e| bad(lineno, format!("{e}")))?;
                    let rest: String = tokens.collect::<Vec<_>>().join(" ");
                    let weight = Scalar::from_str(&rest)
                        .map_err(|e| bad(lineno, format!("bad weight: {e}")))?;
                    if u == 0 || v == 0 {
                        return Err(bad(lineno, "vertex ids are 1-based".into()));
                    }
                    edges.push(Edge {
                        u: u - 1,
                        v: v - 1,
                        weight,
                    });
                }
                "external" => {
                    for tok in tokens {
                        let v: usize =
                            tok.parse().map_err(|e| bad(lineno, format!("{e}")))?;
                        if v == 0 {
                            return Err(bad(lineno, "vertex ids are 1-based".into()));
                        }
                        externals.push(v - 1);
                    }
                }
                "rot" => {
                    let head = tokens
                        .next()
                        .ok_or_else(|| bad(lineno, "missing vertex".into()))?;
                    let head = head.strip_suffix(':').unwrap_or(head);
                    let v: usize = head.parse().map_err(|e| bad(lineno, format!("{e}")))?;
                    let mut nbrs = Vec::new();
                    for tok in tokens {
                        let n: usize =
                            tok.parse().map_err(|e| bad(lineno, format!("{e}")))?;
                        nbrs.push(n - 1);
                    }
                    rot_lines.push((v - 1, nbrs));
                }
                other => return Err(bad(lineno, format!("unknown directive `{other}`"))),
            }
        }
        let vertex_count =
            vertex_count.ok_or_else(|| GateError::Format("missing `nodes` line".into()))?;
        let rotation = if rot_lines.is_empty() {
            None
        } else {
            let mut order = vec![Vec::new(); vertex_count];
            for (v, nbrs) in rot_lines {
                if v >= vertex_count {
                    return Err(GateError::InvalidVertex(v));
                }
                order[v] = nbrs;
            }
            Some(Rotation::new(order))
        };
        Matchgate::new(vertex_count, edges, externals, rotation)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("nodes {}\n", self.vertex_count);
        for e in &self.edges {
            out.push_str(&format!("edge {} {} {}\n", e.u + 1, e.v + 1, e.weight));
        }
        if !self.externals.is_empty() {
            let ids: Vec<String> = self.externals.iter().map(|v| (v + 1).to_string()).collect();
            out.push_str(&format!("external {}\n", ids.join(" ")));
        }
        if let Some(rot) = &self.rotation {
            for (v, ring) in rot.order.iter().enumerate() {
                if ring.is_empty() {
                    continue;
                }
                let ids: Vec<String> = ring.iter().map(|n| (n + 1).to_string()).collect();
                out.push_str(&format!("rot {}: {}\n", v + 1, ids.join(" ")));
            }
        }
        out
    }
}

impl fmt::Display for Matchgate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Glues two gates with one weight-1 edge per pair of external nodes; the
/// paired nodes go internal and the remaining externals keep their order,
/// `a`'s first. Embeddings are merged when both gates carry one, and the
/// merge is Euler-validated.
pub fn compose(
    a: &Matchgate,
    b: &Matchgate,
    pairs: &[(usize, usize)],
) -> Result<Matchgate, GateError> {
    let offset = a.vertex_count;
    let mut used_a = HashSet::new();
    let mut used_b = HashSet::new();
    for &(x, y) in pairs {
        if !a.externals.contains(&x) {
            return Err(GateError::NotExternal(x));
        }
        if !b.externals.contains(&y) {
            return Err(GateError::NotExternal(y));
        }
        if !used_a.insert(x) {
            return Err(GateError::DuplicatePairing(x));
        }
        if !used_b.insert(y) {
            return Err(GateError::DuplicatePairing(y));
        }
    }
    let mut edges = a.edges.clone();
    edges.extend(b.edges.iter().map(|e| Edge {
        u: e.u + offset,
        v: e.v + offset,
        weight: e.weight.clone(),
    }));
    let mut externals: Vec<usize> = a
        .externals
        .iter()
        .copied()
        .filter(|x| !used_a.contains(x))
        .collect();
    externals.extend(
        b.externals
            .iter()
            .copied()
            .filter(|y| !used_b.contains(y))
            .map(|y| y + offset),
    );
    let rotation = match (&a.rotation, &b.rotation) {
        (Some(ra), Some(rb)) => {
            let mut order = ra.order.clone();
            order.extend(
                rb.order
                    .iter()
                    .map(|ring| ring.iter().map(|n| n + offset).collect()),
            );
            Some(Rotation::new(order))
        }
        _ => None,
    };
    let mut gate = Matchgate::new(
        a.vertex_count + b.vertex_count,
        edges,
        externals,
        rotation,
    )?;
    // Connector endpoints not yet glued and the surviving externals must
    // keep sharing a face, so later insertions can reach them.
    let mut pending = vec![false; gate.vertex_count];
    for &(x, y) in pairs {
        pending[x] = true;
        pending[y + offset] = true;
    }
    for &x in &gate.externals {
        pending[x] = true;
    }
    for &(x, y) in pairs {
        let y = y + offset;
        gate.edges.push(Edge {
            u: x,
            v: y,
            weight: Scalar::one(),
        });
        pending[x] = false;
        pending[y] = false;
        if let Some(rot) = &mut gate.rotation {
            let comp = gate_components(gate.vertex_count, &gate.edges, Some((x, y)));
            planar::insert_edge_pending(rot, |v| comp[v], &pending, x, y)?;
        }
    }
    if gate.rotation.is_some() {
        gate.validate_planarity()?;
    }
    Ok(gate)
}

/// Component labels, optionally ignoring one edge (so the merge sees the
/// state before that edge joins its endpoints).
fn gate_components(
    vertex_count: usize,
    edges: &[Edge],
    skip: Option<(usize, usize)>,
) -> Vec<usize> {
    let mut adj = vec![Vec::new(); vertex_count];
    for e in edges {
        if skip == Some((e.u, e.v)) || skip == Some((e.v, e.u)) {
            continue;
        }
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut comp = vec![usize::MAX; vertex_count];
    let mut next = 0;
    for start in 0..vertex_count {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = next;
        while let Some(v) = stack.pop() {
            for &n in &adj[v] {
                if comp[n] == usize::MAX {
                    comp[n] = next;
                    stack.push(n);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Signature-level contraction matching [`compose`]: each pair becomes a
/// weight-1 connector, so paired positions are summed over equal bits.
/// `pairs` lists 1-based external positions of `a` and `b`.
pub fn contract_signatures(
    a: &BooleanSignature,
    b: &BooleanSignature,
    pairs: &[(usize, usize)],
) -> BooleanSignature {
    let na = a.arity();
    let nb = b.arity();
    let k = pairs.len();
    let paired_a: HashSet<usize> = pairs.iter().map(|&(x, _)| x).collect();
    let paired_b: HashSet<usize> = pairs.iter().map(|&(_, y)| y).collect();
    let free_a: Vec<usize> = (1..=na).filter(|p| !paired_a.contains(p)).collect();
    let free_b: Vec<usize> = (1..=nb).filter(|p| !paired_b.contains(p)).collect();
    let out_arity = free_a.len() + free_b.len();
    let mut values = Vec::with_capacity(1 << out_arity);
    for out in 0..1usize << out_arity {
        let mut total = Scalar::zero();
        for y in 0..1usize << k {
            let mut ia = 0usize;
            for (slot, &p) in free_a.iter().enumerate() {
                if bits::get_bit(out, slot + 1, out_arity) {
                    ia |= bits::pos_mask(p, na);
                }
            }
            let mut ib = 0usize;
            for (slot, &p) in free_b.iter().enumerate() {
                if bits::get_bit(out, free_a.len() + slot + 1, out_arity) {
                    ib |= bits::pos_mask(p, nb);
                }
            }
            for (bit, &(pa, pb)) in pairs.iter().enumerate() {
                if y & (1 << bit) != 0 {
                    ia |= bits::pos_mask(pa, na);
                    ib |= bits::pos_mask(pb, nb);
                }
            }
            let lhs = a.value(ia);
            if lhs.is_zero() {
                continue;
            }
            let rhs = b.value(ib);
            if rhs.is_zero() {
                continue;
            }
            total += lhs * rhs;
        }
        values.push(total);
    }
    BooleanSignature::new(out_arity, values).expect("length matches arity")
}

/// Signature of a gate after a weight-`w` pendant is attached at position
/// `pos` with [`PendantMode::Revoke`]: the position is forced to 1 (the
/// leaf always consumes its neighbor) and drops out of the index.
pub fn sig_pendant_revoked(sig: &BooleanSignature, pos: usize, w: &Scalar) -> BooleanSignature {
    let n = sig.arity();
    let mut values = Vec::with_capacity(1 << (n - 1));
    for idx in 0..1usize << (n - 1) {
        values.push(w * sig.value(bits::insert_bit(idx, pos, true, n - 1)));
    }
    BooleanSignature::new(n - 1, values).expect("length matches arity")
}

/// Signature after external position `pos` is simply demoted to an internal
/// node: the position is forced to 0 and drops out of the index.
pub fn sig_demoted(sig: &BooleanSignature, pos: usize) -> BooleanSignature {
    let n = sig.arity();
    let mut values = Vec::with_capacity(1 << (n - 1));
    for idx in 0..1usize << (n - 1) {
        values.push(sig.value(bits::insert_bit(idx, pos, false, n - 1)).clone());
    }
    BooleanSignature::new(n - 1, values).expect("length matches arity")
}

/// Signature after a weight-`w` pendant with [`PendantMode::Transfer`]:
/// the new leaf inverts the role of the bit and scales the branch where it
/// stays present.
pub fn sig_pendant_transferred(
    sig: &BooleanSignature,
    pos: usize,
    w: &Scalar,
) -> BooleanSignature {
    let n = sig.arity();
    let mut values = vec![Scalar::zero(); 1 << n];
    for idx in 0..1usize << n {
        let flipped = bits::flip_bit(idx, pos, n);
        if bits::get_bit(idx, pos, n) {
            // Leaf deleted: the original node is free again.
            values[idx] = sig.value(flipped).clone();
        } else {
            // Leaf present: it consumes the original node.
            values[idx] = w * sig.value(flipped);
        }
    }
    BooleanSignature::new(n, values).expect("length matches arity")
}

/// Signature after a length-2 path `(w1, w2)` is attached at `pos` with the
/// far end external: bit 0 routes through the outer edge, bit 1 through the
/// inner one.
pub fn sig_path2(
    sig: &BooleanSignature,
    pos: usize,
    w1: &Scalar,
    w2: &Scalar,
) -> BooleanSignature {
    let n = sig.arity();
    let mut values = vec![Scalar::zero(); 1 << n];
    for idx in 0..1usize << n {
        if bits::get_bit(idx, pos, n) {
            values[idx] = w1 * sig.value(idx);
        } else {
            values[idx] = w2 * sig.value(idx);
        }
    }
    BooleanSignature::new(n, values).expect("length matches arity")
}
