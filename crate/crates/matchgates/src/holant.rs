//! Bipartite signature grids and their evaluation: the brute-force sum
//! over edge assignments, a matching-backed evaluation for grids whose
//! signatures come with gate realizations, the transformation invariance
//! check, and the constraint-satisfaction encoding.

use std::collections::HashMap;

use thiserror::Error;

use crate::fkt::{self, FktError};
use crate::holo::{
    cotransform_to_domain, equality, right_inverse, transform_to_domain, DomainSignature,
    HoloError, TransformMatrix,
};
use crate::matchgate::{Edge, GateError, Matchgate};
use crate::planar::{self, Rotation};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HolantError {
    #[error("state space {states} exceeds the cap {cap}; raise it explicitly")]
    CapExceeded { states: u64, cap: u64 },
    #[error("vertex {vertex} has degree {degree} but its signature has arity {arity}")]
    DegreeArityMismatch {
        vertex: usize,
        degree: usize,
        arity: usize,
    },
    #[error("vertex {vertex}: edge order must list its incident edges exactly once")]
    BadEdgeOrder { vertex: usize },
    #[error("vertex {vertex}: domain size {got} differs from the grid's {expected}")]
    DomainMismatch {
        vertex: usize,
        got: usize,
        expected: usize,
    },
    #[error("matching-backed evaluation needs domain size 2, grid has {0}")]
    NonBooleanDomain(usize),
    #[error("vertex {vertex}: gate signature does not match the grid signature")]
    GateSignatureMismatch { vertex: usize },
    #[error("vertex {vertex}: no gate realization provided")]
    MissingGate { vertex: usize },
    #[error("constraint {index}: arity {arity} does not match its {vars} variables")]
    ConstraintArity {
        index: usize,
        arity: usize,
        vars: usize,
    },
    #[error(transparent)]
    Holo(#[from] HoloError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Fkt(#[from] FktError),
    #[error("format error: {0}")]
    Format(String),
}

pub const DEFAULT_STATE_CAP: u64 = 1 << 24;

/// One side's vertex: a signature and the counterclockwise order of its
/// incident edge ids.
#[derive(Clone, Debug)]
struct GridVertex {
    signature: DomainSignature,
    order: Vec<usize>,
}

/// A bipartite signature grid: row-side vertices U, column-side vertices
/// V, edges carrying domain-[q] variables.
#[derive(Clone, Debug)]
pub struct SignatureGrid {
    q: usize,
    u_side: Vec<GridVertex>,
    v_side: Vec<GridVertex>,
    edges: Vec<(usize, usize)>,
}

impl SignatureGrid {
    /// Builds and validates a grid. `u_order`/`v_order` give each vertex's
    /// counterclockwise incident-edge order; pass `None` to use edge-input
    /// order.
    pub fn new(
        q: usize,
        u_sigs: Vec<DomainSignature>,
        v_sigs: Vec<DomainSignature>,
        edges: Vec<(usize, usize)>,
        u_order: Option<Vec<Vec<usize>>>,
        v_order: Option<Vec<Vec<usize>>>,
    ) -> Result<Self, HolantError> {
        let incident = |count: usize, pick: fn(&(usize, usize)) -> usize| {
            let mut lists = vec![Vec::new(); count];
            for (k, e) in edges.iter().enumerate() {
                lists[pick(e)].push(k);
            }
            lists
        };
        let u_incident = incident(u_sigs.len(), |e| e.0);
        let v_incident = incident(v_sigs.len(), |e| e.1);
        let u_order = u_order.unwrap_or_else(|| u_incident.clone());
        let v_order = v_order.unwrap_or_else(|| v_incident.clone());
        let build = |sigs: Vec<DomainSignature>,
                         orders: Vec<Vec<usize>>,
                         incident: Vec<Vec<usize>>,
                         offset: usize|
         -> Result<Vec<GridVertex>, HolantError> {
            sigs.into_iter()
                .zip(orders)
                .zip(incident)
                .enumerate()
                .map(|(k, ((signature, order), inc))| {
                    let vertex = k + offset;
                    if signature.domain() != q {
                        return Err(HolantError::DomainMismatch {
                            vertex,
                            got: signature.domain(),
                            expected: q,
                        });
                    }
                    if signature.arity() != inc.len() {
                        return Err(HolantError::DegreeArityMismatch {
                            vertex,
                            degree: inc.len(),
                            arity: signature.arity(),
                        });
                    }
                    let mut sorted = order.clone();
                    sorted.sort_unstable();
                    let mut expect = inc.clone();
                    expect.sort_unstable();
                    if sorted != expect {
                        return Err(HolantError::BadEdgeOrder { vertex });
                    }
                    Ok(GridVertex { signature, order })
                })
                .collect()
        };
        let u_count = u_sigs.len();
        let u_side = build(u_sigs, u_order, u_incident, 0)?;
        let v_side = build(v_sigs, v_order, v_incident, u_count)?;
        Ok(SignatureGrid {
            q,
            u_side,
            v_side,
            edges,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn u_signatures(&self) -> impl Iterator<Item = &DomainSignature> {
        self.u_side.iter().map(|v| &v.signature)
    }

    pub fn v_signatures(&self) -> impl Iterator<Item = &DomainSignature> {
        self.v_side.iter().map(|v| &v.signature)
    }

    /// Replaces the signatures, keeping the graph; used by the
    /// transformation check (domain size may change).
    pub fn with_signatures(
        &self,
        q: usize,
        u_sigs: Vec<DomainSignature>,
        v_sigs: Vec<DomainSignature>,
    ) -> Result<SignatureGrid, HolantError> {
        SignatureGrid::new(
            q,
            u_sigs,
            v_sigs,
            self.edges.clone(),
            Some(self.u_side.iter().map(|v| v.order.clone()).collect()),
            Some(self.v_side.iter().map(|v| v.order.clone()).collect()),
        )
    }

    /// The exact sum over all edge assignments of the vertex-value
    /// products.
    pub fn holant_bruteforce(&self, cap: u64) -> Result<Scalar, HolantError> {
        let states = (self.q as u64).checked_pow(self.edges.len() as u32);
        match states {
            Some(s) if s <= cap => {}
            _ => {
                return Err(HolantError::CapExceeded {
                    states: states.unwrap_or(u64::MAX),
                    cap,
                })
            }
        }
        let mut assignment = vec![0usize; self.edges.len()];
        let mut total = Scalar::zero();
        loop {
            let mut product = Scalar::one();
            let mut zero = false;
            for side in [&self.u_side, &self.v_side] {
                for vertex in side.iter() {
                    let index = vertex
                        .order
                        .iter()
                        .fold(0usize, |acc, &e| acc * self.q + assignment[e]);
                    let value = vertex.signature.value(index);
                    if value.is_zero() {
                        zero = true;
                        break;
                    }
                    product *= value;
                }
                if zero {
                    break;
                }
            }
            if !zero {
                total += product;
            }
            // Odometer step.
            let mut pos = 0;
            loop {
                if pos == assignment.len() {
                    return Ok(total);
                }
                assignment[pos] += 1;
                if assignment[pos] < self.q {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Evaluates the grid by gluing per-vertex gate realizations along the
    /// grid edges into one closed plane graph and counting its matchings.
    /// Each gate's signature must equal its vertex's signature exactly.
    pub fn holant_matchings(
        &self,
        u_gates: &[Matchgate],
        v_gates: &[Matchgate],
    ) -> Result<Scalar, HolantError> {
        if self.q != 2 {
            return Err(HolantError::NonBooleanDomain(self.q));
        }
        if u_gates.len() < self.u_side.len() || v_gates.len() < self.v_side.len() {
            let vertex = u_gates.len().min(self.u_side.len());
            return Err(HolantError::MissingGate { vertex });
        }
        for (k, (vertex, gate)) in self
            .u_side
            .iter()
            .zip(u_gates)
            .chain(self.v_side.iter().zip(v_gates))
            .enumerate()
        {
            let expected = vertex.signature.to_boolean()?;
            if gate.signature() != expected {
                return Err(HolantError::GateSignatureMismatch { vertex: k });
            }
        }
        // Disjoint union of all gates.
        let mut vertex_count = 0usize;
        let mut offsets = Vec::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut order: Vec<Vec<usize>> = Vec::new();
        for gate in u_gates.iter().chain(v_gates.iter()) {
            let rot = gate.rotation().ok_or(FktError::MissingRotation)?;
            offsets.push(vertex_count);
            edges.extend(gate.edges().iter().map(|e| Edge {
                u: e.u + vertex_count,
                v: e.v + vertex_count,
                weight: e.weight.clone(),
            }));
            order.extend(
                rot.order
                    .iter()
                    .map(|ring| ring.iter().map(|n| n + vertex_count).collect::<Vec<_>>()),
            );
            vertex_count += gate.vertex_count();
        }
        let mut rotation = Rotation::new(order);
        // Slot of each grid edge inside its endpoints' orders.
        let connector = |edge_id: usize| -> Result<(usize, usize), HolantError> {
            let (u, v) = self.edges[edge_id];
            let iu = self.u_side[u]
                .order
                .iter()
                .position(|&e| e == edge_id)
                .expect("validated order");
            let iv = self.v_side[v]
                .order
                .iter()
                .position(|&e| e == edge_id)
                .expect("validated order");
            let ua = u_gates[u].externals()[iu] + offsets[u];
            let va = v_gates[v].externals()[iv] + offsets[self.u_side.len() + v];
            Ok((ua, va))
        };
        let mut pending: Vec<bool> = vec![false; vertex_count];
        for edge_id in 0..self.edges.len() {
            let (a, b) = connector(edge_id)?;
            pending[a] = true;
            pending[b] = true;
        }
        for edge_id in 0..self.edges.len() {
            let (a, b) = connector(edge_id)?;
            edges.push(Edge {
                u: a,
                v: b,
                weight: Scalar::one(),
            });
            pending[a] = false;
            pending[b] = false;
            let comp = components_of(vertex_count, &edges, (a, b));
            planar::insert_edge_pending(&mut rotation, |v| comp[v], &pending, a, b)
                .map_err(FktError::Planar)?;
        }
        let closed = Matchgate::new(vertex_count, edges, Vec::new(), Some(rotation))?;
        closed.validate_planarity()?;
        Ok(fkt::perfmatch_fkt(&closed)?)
    }
}

fn components_of(vertex_count: usize, edges: &[Edge], skip: (usize, usize)) -> Vec<usize> {
    let mut adj = vec![Vec::new(); vertex_count];
    for e in edges {
        if (e.u, e.v) == skip || (e.v, e.u) == skip {
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
        comp[start] = next;
        let mut stack = vec![start];
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

/// Outcome of the transformation invariance check: both sides evaluated
/// by brute force, compared exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformCheck {
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl TransformCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Replaces every row-side signature `f` by `f·M^{⊗arity}` and every
/// column-side signature `g` by `M̌^{⊗arity}·g` (with `M·M̌ = I`), then
/// evaluates both grids by brute force. The two values must agree exactly.
pub fn verify_transform_invariance(
    grid: &SignatureGrid,
    m: &TransformMatrix,
    cap: u64,
) -> Result<TransformCheck, HolantError> {
    if m.rows() != grid.q() {
        return Err(HolantError::DomainMismatch {
            vertex: 0,
            got: m.rows(),
            expected: grid.q(),
        });
    }
    let m_check = right_inverse(m)?;
    let lhs = grid.holant_bruteforce(cap)?;
    let u_sigs: Vec<DomainSignature> = grid
        .u_signatures()
        .map(|f| transform_to_domain(f, m))
        .collect::<Result<_, _>>()?;
    let v_sigs: Vec<DomainSignature> = grid
        .v_signatures()
        .map(|g| cotransform_to_domain(g, &m_check))
        .collect::<Result<_, _>>()?;
    let transformed = grid.with_signatures(1 << m.block_size(), u_sigs, v_sigs)?;
    let rhs = transformed.holant_bruteforce(cap)?;
    Ok(TransformCheck { lhs, rhs })
}

/// A counting constraint satisfaction instance over domain [q].
#[derive(Clone, Debug)]
pub struct CspInstance {
    pub q: usize,
    pub variables: usize,
    /// Constraints applied to ordered variable lists.
    pub constraints: Vec<(DomainSignature, Vec<usize>)>,
}

impl CspInstance {
    /// Direct summation over all variable assignments; the oracle the grid
    /// encoding is checked against.
    pub fn direct_value(&self, cap: u64) -> Result<Scalar, HolantError> {
        let states = (self.q as u64).checked_pow(self.variables as u32);
        match states {
            Some(s) if s <= cap => {}
            _ => {
                return Err(HolantError::CapExceeded {
                    states: states.unwrap_or(u64::MAX),
                    cap,
                })
            }
        }
        let mut assignment = vec![0usize; self.variables];
        let mut total = Scalar::zero();
        loop {
            let mut product = Scalar::one();
            for (f, vars) in &self.constraints {
                let index = vars.iter().fold(0usize, |acc, &x| {
                    acc * self.q + assignment[x]
                });
                product *= f.value(index);
                if product.is_zero() {
                    break;
                }
            }
            total += product;
            let mut pos = 0;
            loop {
                if pos == assignment.len() {
                    return Ok(total);
                }
                assignment[pos] += 1;
                if assignment[pos] < self.q {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
        }
    }

    /// The bipartite encoding: one row-side Equality vertex per variable,
    /// one column-side vertex per constraint occurrence, one edge per
    /// variable occurrence in constraint order. A variable with no
    /// occurrences becomes an arity-0 vertex of value q (its free sum).
    pub fn to_grid(&self) -> Result<SignatureGrid, HolantError> {
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut v_sigs = Vec::new();
        let mut var_degree = vec![0usize; self.variables];
        for (index, (f, vars)) in self.constraints.iter().enumerate() {
            if f.arity() != vars.len() {
                return Err(HolantError::ConstraintArity {
                    index,
                    arity: f.arity(),
                    vars: vars.len(),
                });
            }
            for &x in vars {
                edges.push((x, index));
                var_degree[x] += 1;
            }
            v_sigs.push(f.clone());
        }
        let u_sigs: Vec<DomainSignature> = var_degree
            .iter()
            .map(|&deg| {
                if deg == 0 {
                    DomainSignature::new(self.q, 0, vec![Scalar::from_int(self.q as i64)])
                        .map_err(HolantError::from)
                } else {
                    equality(self.q, deg).map_err(HolantError::from)
                }
            })
            .collect::<Result<_, _>>()?;
        SignatureGrid::new(self.q, u_sigs, v_sigs, edges, None, None)
    }
}

/// The Boolean Exact-One signature of the given arity.
pub fn exact_one(arity: usize) -> DomainSignature {
    let mut sig = DomainSignature::zero(2, arity);
    for index in 0..1usize << arity {
        if (index as u64).count_ones() == 1 {
            sig.set(index, Scalar::one());
        }
    }
    if arity == 0 {
        // No variables: "exactly one 1" is unsatisfiable.
        sig.set(0, Scalar::zero());
    }
    sig
}

/// A parsed grid file: the grid plus any per-vertex gate realizations.
pub struct ParsedGrid {
    pub grid: SignatureGrid,
    pub u_gates: Vec<Option<Matchgate>>,
    pub v_gates: Vec<Option<Matchgate>>,
}

impl ParsedGrid {
    pub fn require_gates(&self) -> Result<(Vec<Matchgate>, Vec<Matchgate>), HolantError> {
        let unwrap_side = |side: &[Option<Matchgate>]| -> Result<Vec<Matchgate>, HolantError> {
            side.iter()
                .enumerate()
                .map(|(vertex, g)| g.clone().ok_or(HolantError::MissingGate { vertex }))
                .collect()
        };
        Ok((unwrap_side(&self.u_gates)?, unwrap_side(&self.v_gates)?))
    }
}

/// Grid file format: `q <q>`, `uvertex <id> <sigref>`, `vvertex <id>
/// <sigref>`, `edge <uid> <vid>`, optional `order <id>: <edge numbers
/// ccw>` (1-based in file order) and `gate <id> <path>`. Signature
/// references: `eq:<arity>`, `one:<arity>`, `file:<path>`, `gate:<path>`.
/// The resolver maps path strings to file contents.
pub fn parse_grid_text(
    text: &str,
    resolver: &mut dyn FnMut(&str) -> Result<String, String>,
) -> Result<ParsedGrid, HolantError> {
    struct RawVertex {
        id: usize,
        sigref: String,
        row_side: bool,
    }
    let mut q = None;
    let mut raw: Vec<RawVertex> = Vec::new();
    let mut raw_edges: Vec<(usize, usize)> = Vec::new();
    let mut orders: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut gate_paths: HashMap<usize, String> = HashMap::new();
    for (k, line_raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = line_raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let mut next = || {
            tokens
                .next()
                .ok_or_else(|| HolantError::Format(format!("line {lineno}: missing field")))
        };
        match head {
            "q" => {
                q = Some(
                    next()?
                        .parse::<usize>()
                        .map_err(|e| HolantError::Format(format!("line {lineno}: {e}")))?,
                );
            }
            "uvertex" | "vvertex" => {
                let id: usize = next()?
                    .parse()
                    .map_err(|e| HolantError::Format(format!("line {lineno}: {e}")))?;
                let sigref = next()?.to_string();
                raw.push(RawVertex {
                    id,
                    sigref,
                    row_side: head == "uvertex",
                });
            }
            "edge" => {
                let u: usize = next()?
                    .parse()
                    .map_err(|e| HolantError::Format(format!("line {lineno}: {e}")))?;
                let v: usize = next()?
                    .parse()
                    .map_err(|e| HolantError::Format(format!("line {lineno}: {e}")))?;
                raw_edges.push((u, v));
            }
            "order" => {
                let id_tok = next()?;
                let id_tok = id_tok.strip_suffix(':').unwrap_or(id_tok);
                let id: usize = id_tok
                    .parse()
                    .map_err(|e| HolantError::Format(format!("line {lineno}: {e}")))?;
                let list: Vec<usize> = tokens
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|e| HolantError::Format(format!("line {lineno}: {e}")))
                            .and_then(|n| {
                                n.checked_sub(1).ok_or_else(|| {
                                    HolantError::Format(format!(
                                        "line {lineno}: edge numbers are 1-based"
                                    ))
                                })
                            })
                    })
                    .collect::<Result<_, _>>()?;
                orders.insert(id, list);
            }
            "gate" => {
                let id: usize = next()?
                    .parse()
                    .map_err(|e| HolantError::Format(format!("line {lineno}: {e}")))?;
                gate_paths.insert(id, next()?.to_string());
            }
            other => {
                return Err(HolantError::Format(format!(
                    "line {lineno}: unknown directive `{other}`"
                )))
            }
        }
    }
    let q = q.ok_or_else(|| HolantError::Format("missing `q` line".into()))?;
    let mut u_index: HashMap<usize, usize> = HashMap::new();
    let mut v_index: HashMap<usize, usize> = HashMap::new();
    for vertex in &raw {
        let map = if vertex.row_side {
            &mut u_index
        } else {
            &mut v_index
        };
        let next_id = map.len();
        if map.insert(vertex.id, next_id).is_some() {
            return Err(HolantError::Format(format!(
                "vertex id {} declared twice",
                vertex.id
            )));
        }
    }
    let edges: Vec<(usize, usize)> = raw_edges
        .iter()
        .map(|&(u, v)| {
            let iu = *u_index
                .get(&u)
                .ok_or_else(|| HolantError::Format(format!("unknown row vertex {u}")))?;
            let iv = *v_index
                .get(&v)
                .ok_or_else(|| HolantError::Format(format!("unknown column vertex {v}")))?;
            Ok((iu, iv))
        })
        .collect::<Result<_, HolantError>>()?;
    let mut u_sigs = vec![None; u_index.len()];
    let mut v_sigs = vec![None; v_index.len()];
    let mut u_gates: Vec<Option<Matchgate>> = vec![None; u_index.len()];
    let mut v_gates: Vec<Option<Matchgate>> = vec![None; v_index.len()];
    for vertex in &raw {
        let degree = if vertex.row_side {
            edges.iter().filter(|e| e.0 == u_index[&vertex.id]).count()
        } else {
            edges.iter().filter(|e| e.1 == v_index[&vertex.id]).count()
        };
        let (sig, gate) = resolve_sigref(&vertex.sigref, q, degree, resolver)?;
        if vertex.row_side {
            u_sigs[u_index[&vertex.id]] = Some(sig);
            u_gates[u_index[&vertex.id]] = gate;
        } else {
            v_sigs[v_index[&vertex.id]] = Some(sig);
            v_gates[v_index[&vertex.id]] = gate;
        }
    }
    for (id, path) in &gate_paths {
        let text = resolver(path).map_err(HolantError::Format)?;
        let gate = Matchgate::parse_text(&text)?;
        if let Some(&k) = u_index.get(id) {
            u_gates[k] = Some(gate);
        } else if let Some(&k) = v_index.get(id) {
            v_gates[k] = Some(gate);
        } else {
            return Err(HolantError::Format(format!(
                "gate line references unknown vertex {id}"
            )));
        }
    }
    let mut u_order = vec![Vec::new(); u_index.len()];
    let mut v_order = vec![Vec::new(); v_index.len()];
    for vertex in &raw {
        let (slot, out, pick): (usize, &mut Vec<Vec<usize>>, fn(&(usize, usize)) -> usize) =
            if vertex.row_side {
                (u_index[&vertex.id], &mut u_order, |e| e.0)
            } else {
                (v_index[&vertex.id], &mut v_order, |e| e.1)
            };
        out[slot] = match orders.get(&vertex.id) {
            Some(list) => list.clone(),
            None => edges
                .iter()
                .enumerate()
                .filter(|(_, e)| pick(e) == slot)
                .map(|(k, _)| k)
                .collect(),
        };
    }
    let grid = SignatureGrid::new(
        q,
        u_sigs.into_iter().map(Option::unwrap).collect(),
        v_sigs.into_iter().map(Option::unwrap).collect(),
        edges,
        Some(u_order),
        Some(v_order),
    )?;
    Ok(ParsedGrid {
        grid,
        u_gates,
        v_gates,
    })
}

fn resolve_sigref(
    sigref: &str,
    q: usize,
    degree: usize,
    resolver: &mut dyn FnMut(&str) -> Result<String, String>,
) -> Result<(DomainSignature, Option<Matchgate>), HolantError> {
    if let Some(arity) = sigref.strip_prefix("eq:") {
        let arity: usize = arity
            .parse()
            .map_err(|e| HolantError::Format(format!("bad eq arity: {e}")))?;
        return Ok((equality(q, arity)?, None));
    }
    if let Some(arity) = sigref.strip_prefix("one:") {
        let arity: usize = arity
            .parse()
            .map_err(|e| HolantError::Format(format!("bad one arity: {e}")))?;
        if q != 2 {
            return Err(HolantError::NonBooleanDomain(q));
        }
        return Ok((exact_one(arity), None));
    }
    if let Some(path) = sigref.strip_prefix("file:") {
        let text = resolver(path).map_err(HolantError::Format)?;
        return Ok((DomainSignature::parse_text(&text)?, None));
    }
    if let Some(path) = sigref.strip_prefix("gate:") {
        let text = resolver(path).map_err(HolantError::Format)?;
        let gate = Matchgate::parse_text(&text)?;
        let sig = DomainSignature::from_boolean(&gate.signature());
        if q != 2 {
            return Err(HolantError::NonBooleanDomain(q));
        }
        return Ok((sig, Some(gate)));
    }
    let _ = degree;
    Err(HolantError::Format(format!(
        "unknown signature reference `{sigref}`"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchgate::Edge;

    fn unary(values: &[i64]) -> DomainSignature {
        DomainSignature::new(
            values.len(),
            1,
            values.iter().map(|&v| Scalar::from_int(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_vertex_inner_product() {
        let u = unary(&[2, 3]);
        let v = unary(&[5, 7]);
        let grid =
            SignatureGrid::new(2, vec![u], vec![v], vec![(0, 0)], None, None).unwrap();
        // Σ_x u(x) v(x) = 2·5 + 3·7.
        assert_eq!(
            grid.holant_bruteforce(DEFAULT_STATE_CAP).unwrap(),
            Scalar::from_int(31)
        );
    }

    /// The 4-cycle with Exact-One everywhere counts its perfect matchings.
    fn c4_grid() -> SignatureGrid {
        let one2 = exact_one(2);
        // u0, u1 row side; v0, v1 column side.
        // Cycle: u0 -e0- v0 -e1- u1 -e2- v1 -e3- u0.
        SignatureGrid::new(
            2,
            vec![one2.clone(), one2.clone()],
            vec![one2.clone(), one2],
            vec![(0, 0), (1, 0), (1, 1), (0, 1)],
            Some(vec![vec![0, 3], vec![1, 2]]),
            Some(vec![vec![0, 1], vec![2, 3]]),
        )
        .unwrap()
    }

    #[test]
    fn c4_perfect_matchings() {
        assert_eq!(
            c4_grid().holant_bruteforce(DEFAULT_STATE_CAP).unwrap(),
            Scalar::from_int(2)
        );
    }

    /// Path gate a-c-b realizing Exact-One of arity 2.
    fn exact_one_gate() -> Matchgate {
        Matchgate::new(
            3,
            vec![
                Edge { u: 0, v: 2, weight: Scalar::one() },
                Edge { u: 2, v: 1, weight: Scalar::one() },
            ],
            vec![0, 1],
            Some(Rotation::new(vec![vec![2], vec![2], vec![0, 1]])),
        )
        .unwrap()
    }

    #[test]
    fn c4_matching_route_agrees() {
        let grid = c4_grid();
        let gate = exact_one_gate();
        let gates = vec![gate.clone(), gate.clone()];
        let value = grid.holant_matchings(&gates, &gates.clone()).unwrap();
        assert_eq!(value, Scalar::from_int(2));
    }

    #[test]
    fn matching_route_rejects_wrong_gate() {
        let grid = c4_grid();
        let bad = Matchgate::new(
            2,
            vec![Edge { u: 0, v: 1, weight: Scalar::one() }],
            vec![0, 1],
            Some(Rotation::new(vec![vec![1], vec![0]])),
        )
        .unwrap();
        let gates = vec![bad.clone(), bad.clone()];
        assert!(matches!(
            grid.holant_matchings(&gates, &gates.clone()),
            Err(HolantError::GateSignatureMismatch { .. })
        ));
    }

    #[test]
    fn empty_edge_set_multiplies_scalars() {
        let s3 = DomainSignature::new(2, 0, vec![Scalar::from_int(3)]).unwrap();
        let s5 = DomainSignature::new(2, 0, vec![Scalar::from_int(5)]).unwrap();
        let grid = SignatureGrid::new(2, vec![s3], vec![s5], vec![], None, None).unwrap();
        assert_eq!(
            grid.holant_bruteforce(DEFAULT_STATE_CAP).unwrap(),
            Scalar::from_int(15)
        );
    }

    #[test]
    fn transform_invariance_identity() {
        let grid = c4_grid();
        let id = TransformMatrix::new(crate::matrix::Matrix::identity(2)).unwrap();
        let check = verify_transform_invariance(&grid, &id, DEFAULT_STATE_CAP).unwrap();
        assert!(check.holds());
        assert_eq!(check.lhs, Scalar::from_int(2));
    }

    #[test]
    fn transform_invariance_hadamard() {
        let grid = c4_grid();
        let h = TransformMatrix::hadamard_unnormalized();
        let check = verify_transform_invariance(&grid, &h, DEFAULT_STATE_CAP).unwrap();
        assert!(check.holds());
        let hn = TransformMatrix::hadamard_normalized();
        let check = verify_transform_invariance(&grid, &hn, DEFAULT_STATE_CAP).unwrap();
        assert!(check.holds());
    }

    #[test]
    fn csp_single_binary_constraint_on_one_variable() {
        // f(x, x) over q = 3: the grid value is Σ_i f(i, i).
        let mut f = DomainSignature::zero(3, 2);
        for i in 0..3 {
            for j in 0..3 {
                f.set(i * 3 + j, Scalar::from_int((i * 3 + j) as i64 + 1));
            }
        }
        let csp = CspInstance {
            q: 3,
            variables: 1,
            constraints: vec![(f.clone(), vec![0, 0])],
        };
        let grid = csp.to_grid().unwrap();
        let value = grid.holant_bruteforce(DEFAULT_STATE_CAP).unwrap();
        let diag = Scalar::from_int(1 + 5 + 9);
        assert_eq!(value, diag);
        assert_eq!(csp.direct_value(DEFAULT_STATE_CAP).unwrap(), diag);
    }

    #[test]
    fn csp_two_variables_sum() {
        let mut f = DomainSignature::zero(2, 2);
        for index in 0..4 {
            f.set(index, Scalar::from_int(index as i64 + 1));
        }
        let csp = CspInstance {
            q: 2,
            variables: 2,
            constraints: vec![(f, vec![0, 1])],
        };
        let grid = csp.to_grid().unwrap();
        assert_eq!(
            grid.holant_bruteforce(DEFAULT_STATE_CAP).unwrap(),
            Scalar::from_int(1 + 2 + 3 + 4)
        );
    }

    #[test]
    fn csp_unused_variable_contributes_q() {
        let f = unary(&[1, 1]);
        let csp = CspInstance {
            q: 2,
            variables: 2,
            constraints: vec![(f, vec![0])],
        };
        assert_eq!(
            csp.to_grid()
                .unwrap()
                .holant_bruteforce(DEFAULT_STATE_CAP)
                .unwrap(),
            csp.direct_value(DEFAULT_STATE_CAP).unwrap()
        );
    }

    #[test]
    fn closed_gate_vertex_counts_its_own_matchings() {
        // A degree-0 vertex carries an arity-0 signature; the matching
        // route multiplies in the gate's own PerfMatch.
        let gate = Matchgate::new(
            2,
            vec![Edge { u: 0, v: 1, weight: Scalar::from_int(5) }],
            vec![],
            Some(Rotation::new(vec![vec![1], vec![0]])),
        )
        .unwrap();
        let sig = DomainSignature::from_boolean(&gate.signature());
        let grid = SignatureGrid::new(2, vec![sig], vec![], vec![], None, None).unwrap();
        let brute = grid.holant_bruteforce(DEFAULT_STATE_CAP).unwrap();
        let matched = grid.holant_matchings(&[gate], &[]).unwrap();
        assert_eq!(brute, Scalar::from_int(5));
        assert_eq!(matched, Scalar::from_int(5));
    }

    #[test]
    fn constraint_arity_mismatch_is_rejected() {
        let f = unary(&[1, 2]);
        let csp = CspInstance {
            q: 2,
            variables: 2,
            constraints: vec![(f, vec![0, 1])],
        };
        assert!(matches!(
            csp.to_grid(),
            Err(HolantError::ConstraintArity { .. })
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let grid = c4_grid();
        assert!(matches!(
            grid.holant_bruteforce(3),
            Err(HolantError::CapExceeded { .. })
        ));
    }
}
