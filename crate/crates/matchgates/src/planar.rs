//! Combinatorial plane embeddings: rotation systems, face traversal, the
//! Euler genus check, and planarity-preserving edge insertion.
//!
//! A rotation system lists each vertex's neighbors in counterclockwise
//! order. Faces are traced with the rule `next(u→v) = (v→w)` where `w`
//! precedes `u` in the rotation at `v`; under that rule every face of a
//! genus-0 embedding is traced counterclockwise except one, which plays the
//! role of the outer face.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanarError {
    #[error("rotation at vertex {vertex} does not list its neighbors exactly once")]
    InconsistentRotation { vertex: usize },
    #[error("rotation system has genus > 0: V={v} E={e} F={f}")]
    NotPlanar { v: usize, e: usize, f: usize },
    #[error("vertices {a} and {b} share no face; the edge cannot be added in the plane")]
    NoCommonFace { a: usize, b: usize },
    #[error("vertex {0} is missing from the embedding")]
    MissingVertex(usize),
}

/// Counterclockwise neighbor lists, one per vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Rotation {
    pub order: Vec<Vec<usize>>,
}

impl Rotation {
    pub fn new(order: Vec<Vec<usize>>) -> Self {
        Rotation { order }
    }

    pub fn empty(vertices: usize) -> Self {
        Rotation {
            order: vec![Vec::new(); vertices],
        }
    }

    pub fn vertices(&self) -> usize {
        self.order.len()
    }

    /// Validates against an undirected edge list: every edge must appear in
    /// both endpoints' rotations exactly once, with nothing extra.
    pub fn validate(&self, edges: &[(usize, usize)]) -> Result<(), PlanarError> {
        let mut expected: Vec<Vec<usize>> = vec![Vec::new(); self.order.len()];
        for &(u, v) in edges {
            expected[u].push(v);
            expected[v].push(u);
        }
        for (vertex, nbrs) in self.order.iter().enumerate() {
            let mut a = nbrs.clone();
            let mut b = expected[vertex].clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b || has_duplicates(&a) {
                return Err(PlanarError::InconsistentRotation { vertex });
            }
        }
        Ok(())
    }

    fn position(&self, v: usize, nbr: usize) -> Option<usize> {
        self.order[v].iter().position(|&x| x == nbr)
    }

    /// Neighbor preceding `nbr` in the counterclockwise order at `v`.
    fn pred(&self, v: usize, nbr: usize) -> usize {
        let ring = &self.order[v];
        let pos = self.position(v, nbr).expect("neighbor in rotation");
        ring[(pos + ring.len() - 1) % ring.len()]
    }

    /// Inserts `new` immediately after `after` in the rotation at `v`.
    pub fn insert_after(&mut self, v: usize, after: usize, new: usize) {
        let pos = self.position(v, after).expect("neighbor in rotation");
        self.order[v].insert(pos + 1, new);
    }
}

fn has_duplicates(sorted: &[usize]) -> bool {
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// A traced face: the cyclic sequence of directed half-edges along its
/// boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub boundary: Vec<(usize, usize)>,
}

impl Face {
    /// Corner slots of this face at vertex `v`: pairs `(in_nbr, out_nbr)`
    /// of the arriving and leaving neighbor around each visit.
    pub fn corners_at(&self, v: usize) -> Vec<(usize, usize)> {
        let len = self.boundary.len();
        let mut out = Vec::new();
        for (k, &(from, to)) in self.boundary.iter().enumerate() {
            if to == v {
                let (_, next) = self.boundary[(k + 1) % len];
                out.push((from, next));
            }
        }
        out
    }

    pub fn touches(&self, v: usize) -> bool {
        self.boundary.iter().any(|&(_, to)| to == v)
    }
}

/// Traces every face of the rotation system. Isolated vertices contribute
/// no faces.
pub fn trace_faces(rotation: &Rotation) -> Vec<Face> {
    let mut seen: HashMap<(usize, usize), bool> = HashMap::new();
    let mut faces = Vec::new();
    for v in 0..rotation.vertices() {
        for &n in &rotation.order[v] {
            if seen.contains_key(&(v, n)) {
                continue;
            }
            let mut boundary = Vec::new();
            let (mut from, mut to) = (v, n);
            loop {
                boundary.push((from, to));
                seen.insert((from, to), true);
                let next = rotation.pred(to, from);
                from = to;
                to = next;
                if (from, to) == (v, n) {
                    break;
                }
            }
            faces.push(Face { boundary });
        }
    }
    faces
}

/// Euler check for one connected component: `V − E + F = 2`.
pub fn euler_check(
    vertices: usize,
    edges: usize,
    rotation: &Rotation,
) -> Result<Vec<Face>, PlanarError> {
    let faces = trace_faces(rotation);
    let f = faces.len().max(1);
    if vertices + f != edges + 2 {
        return Err(PlanarError::NotPlanar {
            v: vertices,
            e: edges,
            f,
        });
    }
    Ok(faces)
}

/// Inserts the undirected edge `(a, b)` into the embedding, keeping it
/// planar. Both endpoints must share a face when they are already
/// connected; across components any face of each side serves.
pub fn insert_edge(
    rotation: &mut Rotation,
    component: impl Fn(usize) -> usize,
    a: usize,
    b: usize,
) -> Result<(), PlanarError> {
    if a >= rotation.vertices() || b >= rotation.vertices() {
        return Err(PlanarError::MissingVertex(a.max(b)));
    }
    if rotation.order[a].is_empty() || rotation.order[b].is_empty() {
        // A corner-less endpoint accepts the edge anywhere.
        rotation.order[a].push(b);
        rotation.order[b].push(a);
        return Ok(());
    }
    let faces = trace_faces(rotation);
    if component(a) == component(b) {
        for face in &faces {
            let ca = face.corners_at(a);
            let cb = face.corners_at(b);
            if let (Some(&(_, out_a)), Some(&(_, out_b))) = (ca.first(), cb.first()) {
                rotation.insert_after(a, out_a, b);
                rotation.insert_after(b, out_b, a);
                return Ok(());
            }
        }
        Err(PlanarError::NoCommonFace { a, b })
    } else {
        let corner = |v: usize| {
            faces
                .iter()
                .find_map(|f| f.corners_at(v).first().copied())
                .expect("non-isolated vertex lies on a face")
        };
        let (_, out_a) = corner(a);
        let (_, out_b) = corner(b);
        rotation.insert_after(a, out_a, b);
        rotation.insert_after(b, out_b, a);
        Ok(())
    }
}

/// The slot after which a new outer edge should enter the rotation at `v`,
/// given a face known to pass through `v`.
pub fn corner_slot(face: &Face, v: usize) -> Option<usize> {
    face.corners_at(v).first().map(|&(_, out)| out)
}

/// Inserts the edge `(a, b)` preferring faces and corners that keep the
/// `pending` vertices on one face; repeated gluing along a list of pending
/// attachment points then keeps the unused points mutually reachable.
pub fn insert_edge_pending(
    rotation: &mut Rotation,
    component: impl Fn(usize) -> usize,
    pending: &[bool],
    a: usize,
    b: usize,
) -> Result<(), PlanarError> {
    if a >= rotation.vertices() || b >= rotation.vertices() {
        return Err(PlanarError::MissingVertex(a.max(b)));
    }
    if rotation.order[a].is_empty() || rotation.order[b].is_empty() {
        rotation.order[a].push(b);
        rotation.order[b].push(a);
        return Ok(());
    }
    let faces = trace_faces(rotation);
    let is_pending = |v: usize| pending.get(v).copied().unwrap_or(false);
    let pending_count = |face: &Face| {
        let mut seen: Vec<usize> = face
            .boundary
            .iter()
            .map(|&(_, to)| to)
            .filter(|&v| is_pending(v))
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    };
    if component(a) == component(b) {
        // A chord splits its face in two; search the corner pairs for a
        // split that leaves no pending vertex cut off from the rest.
        let mut fallback: Option<(usize, usize)> = None;
        for face in faces.iter().filter(|f| f.touches(a) && f.touches(b)) {
            let len = face.boundary.len();
            let corners = |v: usize| {
                (0..len)
                    .filter(|&k| face.boundary[k].1 == v)
                    .collect::<Vec<usize>>()
            };
            let on_face: Vec<usize> = {
                let mut vs: Vec<usize> = face
                    .boundary
                    .iter()
                    .map(|&(_, to)| to)
                    .filter(|&v| is_pending(v))
                    .collect();
                vs.sort_unstable();
                vs.dedup();
                vs
            };
            for &ia in &corners(a) {
                for &ib in &corners(b) {
                    let slot_a = face.boundary[(ia + 1) % len].1;
                    let slot_b = face.boundary[(ib + 1) % len].1;
                    if fallback.is_none() {
                        fallback = Some((slot_a, slot_b));
                    }
                    // Visits along each side of the would-be chord.
                    let walk = |from: usize, until: usize| {
                        let mut seg = Vec::new();
                        let mut k = from;
                        loop {
                            seg.push(face.boundary[k].1);
                            if k == until {
                                break;
                            }
                            k = (k + 1) % len;
                        }
                        seg
                    };
                    let side1 = walk((ia + 1) % len, ib);
                    let side2 = walk((ib + 1) % len, ia);
                    let fits = |seg: &[usize]| {
                        on_face
                            .iter()
                            .all(|&v| v == a || v == b || seg.contains(&v))
                    };
                    if fits(&side1) || fits(&side2) {
                        rotation.insert_after(a, slot_a, b);
                        rotation.insert_after(b, slot_b, a);
                        return Ok(());
                    }
                }
            }
        }
        let (slot_a, slot_b) = fallback.ok_or(PlanarError::NoCommonFace { a, b })?;
        rotation.insert_after(a, slot_a, b);
        rotation.insert_after(b, slot_b, a);
        Ok(())
    } else {
        // A bridge fuses two faces; only the face choice matters.
        fn best<'f>(
            candidates: Vec<&'f Face>,
            score: impl Fn(&Face) -> usize,
        ) -> Option<&'f Face> {
            candidates.into_iter().max_by_key(|f| score(f))
        }
        let fa = best(
            faces.iter().filter(|f| f.touches(a)).collect(),
            pending_count,
        )
        .ok_or(PlanarError::MissingVertex(a))?;
        let fb = best(
            faces.iter().filter(|f| f.touches(b)).collect(),
            pending_count,
        )
        .ok_or(PlanarError::MissingVertex(b))?;
        let slot_a = corner_slot(fa, a).expect("face touches a");
        let slot_b = corner_slot(fb, b).expect("face touches b");
        rotation.insert_after(a, slot_a, b);
        rotation.insert_after(b, slot_b, a);
        Ok(())
    }
}

/// Finds a face whose boundary visits every listed vertex, preferring the
/// first in trace order. Matchgates keep their external nodes on such a
/// face.
pub fn common_face<'f>(faces: &'f [Face], vertices: &[usize]) -> Option<&'f Face> {
    faces
        .iter()
        .find(|f| vertices.iter().all(|&v| f.touches(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Unit square, counterclockwise rotations as embedded.
    fn square() -> (Rotation, Vec<(usize, usize)>) {
        // 0=(0,0) 1=(1,0) 2=(1,1) 3=(0,1)
        let rotation = Rotation::new(vec![vec![1, 3], vec![2, 0], vec![3, 1], vec![0, 2]]);
        let edges = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
        (rotation, edges)
    }

    #[test]
    fn square_faces_and_euler() {
        let (rotation, edges) = square();
        rotation.validate(&edges).unwrap();
        let faces = euler_check(4, 4, &rotation).unwrap();
        assert_eq!(faces.len(), 2);
        let lens: Vec<usize> = faces.iter().map(|f| f.boundary.len()).collect();
        assert_eq!(lens, vec![4, 4]);
    }

    #[test]
    fn inner_face_traced_counterclockwise() {
        let (rotation, _) = square();
        let faces = trace_faces(&rotation);
        // One trace runs 0→1→2→3 (counterclockwise in the embedding), the
        // other runs the boundary clockwise.
        let dirs: Vec<Vec<(usize, usize)>> = faces.iter().map(|f| f.boundary.clone()).collect();
        assert!(dirs
            .iter()
            .any(|b| b.contains(&(0, 1)) && b.contains(&(1, 2))));
        assert!(dirs
            .iter()
            .any(|b| b.contains(&(1, 0)) && b.contains(&(0, 3))));
    }

    #[test]
    fn chord_insertion_splits_face() {
        let (mut rotation, _) = square();
        let comp = |_v: usize| 0usize;
        insert_edge(&mut rotation, comp, 0, 2).unwrap();
        let faces = euler_check(4, 5, &rotation).unwrap();
        assert_eq!(faces.len(), 3);
    }

    #[test]
    fn rotation_validation_rejects_missing_edge() {
        let (rotation, mut edges) = square();
        edges.push((0, 2));
        assert!(rotation.validate(&edges).is_err());
    }

    #[test]
    fn k4_is_planar_k33_is_not() {
        // K4 embedded: outer triangle 0-1-2 with 3 in the middle.
        let k4 = Rotation::new(vec![
            vec![1, 3, 2],
            vec![2, 3, 0],
            vec![0, 3, 1],
            vec![0, 1, 2],
        ]);
        k4.validate(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .unwrap();
        assert!(euler_check(4, 6, &k4).is_ok());

        // K5 with an arbitrary rotation system cannot satisfy Euler.
        let mut order = Vec::new();
        for v in 0..5usize {
            order.push((0..5).filter(|&u| u != v).collect());
        }
        let k5 = Rotation::new(order);
        assert!(euler_check(5, 10, &k5).is_err());
    }
}
