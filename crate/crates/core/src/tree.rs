//! Points of the universal cover.
//!
//! With a spanning tree fixed, the cover is tiled by lifted copies of that
//! tree indexed by deck-group elements, so a vertex is addressed canonically
//! as (reduced word, quotient vertex).  The geodesic between two vertices is
//! recovered by unfolding both to the base vertex and cancelling the common
//! prefix; all lengths are exact rationals.

use num::Zero;

use crate::graph::{DirEdge, MetricGraph};
use crate::rat::Rat;
use crate::word::Word;

/// A vertex of the universal cover: tile address plus quotient vertex.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TreeVertex {
    pub word: Word,
    pub vertex: usize,
}

impl TreeVertex {
    pub fn new(word: Word, vertex: usize) -> Self {
        TreeVertex { word, vertex }
    }
}

/// A point of the universal cover: a vertex, or an interior point of an
/// edge lift.  Interior points are canonicalized to sit on the forward
/// orientation of their edge with offset strictly inside `(0, len)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TreePoint {
    Vertex(TreeVertex),
    Interior {
        from: TreeVertex,
        edge: DirEdge,
        offset: Rat,
    },
}

impl TreePoint {
    pub fn vertex(word: Word, vertex: usize) -> Self {
        TreePoint::Vertex(TreeVertex::new(word, vertex))
    }

    /// The base vertex of the cover (identity tile over quotient vertex 0).
    pub fn base(graph: &MetricGraph) -> Self {
        TreePoint::vertex(Word::identity(), graph.base_vertex())
    }
}

impl MetricGraph {
    /// Base vertex of the cover as a [`TreeVertex`].
    pub fn base_tree_vertex(&self) -> TreeVertex {
        TreeVertex::new(Word::identity(), self.base_vertex())
    }

    /// Crosses directed edge `d` (which must leave `tv`'s quotient vertex).
    pub fn step(&self, tv: &TreeVertex, d: DirEdge) -> TreeVertex {
        debug_assert_eq!(self.tail(d), tv.vertex, "edge does not start here");
        match self.generator_of(d) {
            None => TreeVertex::new(tv.word.clone(), self.head(d)),
            Some((g, inv)) => TreeVertex::new(
                tv.word.mul(&Word::generator(g, inv)),
                self.head(d),
            ),
        }
    }

    /// Walks a directed edge path starting at `tv`.
    pub fn walk(&self, tv: &TreeVertex, path: &[DirEdge]) -> TreeVertex {
        let mut cur = tv.clone();
        for &d in path {
            cur = self.step(&cur, d);
        }
        cur
    }

    /// The deck transformation `gamma` applied to a cover vertex.
    pub fn act_vertex(&self, gamma: &Word, tv: &TreeVertex) -> TreeVertex {
        TreeVertex::new(gamma.mul(&tv.word), tv.vertex)
    }

    /// The deck transformation applied to any cover point.  Deck maps
    /// preserve quotient edge labels, so only the tile address moves.
    pub fn act_point(&self, gamma: &Word, p: &TreePoint) -> TreePoint {
        match p {
            TreePoint::Vertex(tv) => TreePoint::Vertex(self.act_vertex(gamma, tv)),
            TreePoint::Interior { from, edge, offset } => TreePoint::Interior {
                from: self.act_vertex(gamma, from),
                edge: *edge,
                offset: offset.clone(),
            },
        }
    }

    /// The unique reduced edge path from the base vertex to `tv`.
    ///
    /// The path alternates spanning-tree segments with generator crossings
    /// in the order of `tv.word`; reducedness of the word makes the
    /// concatenation non-backtracking, hence geodesic.
    pub fn path_from_base(&self, tv: &TreeVertex) -> Vec<DirEdge> {
        let mut path = Vec::new();
        let mut cur = self.base_vertex();
        for &letter in tv.word.letters() {
            let (g, inv) = Word::decode(letter);
            let d = self.dir_edge_of_generator(g, inv);
            path.extend(self.tree_path(cur, self.tail(d)));
            path.push(d);
            cur = self.head(d);
        }
        path.extend(self.tree_path(cur, tv.vertex));
        path
    }

    /// Exact distance between two cover vertices.
    pub fn vertex_distance(&self, a: &TreeVertex, b: &TreeVertex) -> Rat {
        if a == b {
            return Rat::zero();
        }
        let pa = self.path_from_base(a);
        let pb = self.path_from_base(b);
        let k = common_prefix(&pa, &pb);
        pa[k..]
            .iter()
            .chain(pb[k..].iter())
            .map(|&d| self.len(d))
            .sum()
    }

    /// Canonicalizes an interior description into a [`TreePoint`].
    pub fn point_on_edge(&self, from: &TreeVertex, edge: DirEdge, offset: Rat) -> TreePoint {
        debug_assert_eq!(self.tail(edge), from.vertex);
        debug_assert!(offset >= Rat::zero() && offset <= *self.len(edge));
        if offset.is_zero() {
            return TreePoint::Vertex(from.clone());
        }
        if offset == *self.len(edge) {
            return TreePoint::Vertex(self.step(from, edge));
        }
        if edge % 2 == 0 {
            TreePoint::Interior {
                from: from.clone(),
                edge,
                offset,
            }
        } else {
            TreePoint::Interior {
                from: self.step(from, edge),
                edge: edge ^ 1,
                offset: self.len(edge) - offset,
            }
        }
    }

    /// The endpoints of the edge a point sits on, with its split distances,
    /// or `None` for a vertex.
    fn interior_parts(&self, p: &TreePoint) -> Option<(TreeVertex, TreeVertex, Rat, Rat)> {
        match p {
            TreePoint::Vertex(_) => None,
            TreePoint::Interior { from, edge, offset } => {
                let to = self.step(from, *edge);
                let rest = self.len(*edge) - offset;
                Some((from.clone(), to, offset.clone(), rest))
            }
        }
    }

    /// Exact distance between any two cover points.
    pub fn distance(&self, x: &TreePoint, y: &TreePoint) -> Rat {
        match (x, y) {
            (TreePoint::Vertex(a), TreePoint::Vertex(b)) => self.vertex_distance(a, b),
            _ => {
                // Same-edge case first: both interior on one edge lift.
                if let (
                    TreePoint::Interior { from: fa, edge: ea, offset: oa },
                    TreePoint::Interior { from: fb, edge: eb, offset: ob },
                ) = (x, y)
                {
                    if fa == fb && ea == eb {
                        return if oa >= ob { oa - ob } else { ob - oa };
                    }
                }
                // Otherwise route through edge endpoints.  A same-edge pair
                // was handled, so the geodesic leaves via an endpoint.
                let via = |p: &TreePoint, q: &TreePoint| -> Rat {
                    match self.interior_parts(p) {
                        None => {
                            let TreePoint::Vertex(a) = p else { unreachable!() };
                            match self.interior_parts(q) {
                                None => {
                                    let TreePoint::Vertex(b) = q else { unreachable!() };
                                    self.vertex_distance(a, b)
                                }
                                Some((bu, bv, bo, br)) => {
                                    let d1 = self.vertex_distance(a, &bu) + &bo;
                                    let d2 = self.vertex_distance(a, &bv) + &br;
                                    d1.min(d2)
                                }
                            }
                        }
                        Some((au, av, ao, ar)) => {
                            let d1 = self.distance(&TreePoint::Vertex(au), q) + &ao;
                            let d2 = self.distance(&TreePoint::Vertex(av), q) + &ar;
                            d1.min(d2)
                        }
                    }
                };
                via(x, y)
            }
        }
    }
}

/// Length of the longest common prefix of two edge paths.
pub fn common_prefix(a: &[DirEdge], b: &[DirEdge]) -> usize {
    a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, ratio};

    fn rose2() -> MetricGraph {
        MetricGraph::rose(&[rat(1), rat(1)])
    }

    #[test]
    fn steps_compose_with_reversal() {
        let g = rose2();
        let base = g.base_tree_vertex();
        let a = g.step(&base, 0);
        assert_eq!(a.word, Word::parse("a").unwrap());
        let back = g.step(&a, 1);
        assert_eq!(back, base);
    }

    #[test]
    fn path_from_base_is_reduced() {
        let g = rose2();
        let tv = TreeVertex::new(Word::parse("abA").unwrap(), 0);
        let p = g.path_from_base(&tv);
        assert_eq!(p.len(), 3);
        for w in p.windows(2) {
            assert_ne!(w[1], w[0] ^ 1, "backtracking path");
        }
    }

    #[test]
    fn vertex_distances_on_roses() {
        let g = rose2();
        let base = g.base_tree_vertex();
        let aa = TreeVertex::new(Word::parse("aa").unwrap(), 0);
        assert_eq!(g.vertex_distance(&base, &aa), rat(2));

        let g12 = MetricGraph::rose(&[rat(1), rat(2)]);
        let ab = TreeVertex::new(Word::parse("ab").unwrap(), 0);
        assert_eq!(g12.vertex_distance(&g12.base_tree_vertex(), &ab), rat(3));
        let abab = TreeVertex::new(Word::parse("aabb").unwrap(), 0);
        assert_eq!(g12.vertex_distance(&ab, &abab), rat(2) + rat(1) + rat(2) + rat(2));
    }

    #[test]
    fn interior_points_canonicalize() {
        let g = rose2();
        let base = g.base_tree_vertex();
        // Offset 1/3 along the reversed a-edge equals offset 2/3 forward
        // from the far endpoint.
        let p = g.point_on_edge(&base, 1, ratio(1, 3));
        let TreePoint::Interior { edge, offset, from } = &p else {
            panic!("expected interior")
        };
        assert_eq!(*edge, 0);
        assert_eq!(*offset, ratio(2, 3));
        assert_eq!(from.word, Word::parse("A").unwrap());
        // Degenerate offsets collapse to vertices.
        assert_eq!(
            g.point_on_edge(&base, 0, rat(1)),
            TreePoint::vertex(Word::parse("a").unwrap(), 0)
        );
    }

    #[test]
    fn interior_distance() {
        let g = rose2();
        let base = g.base_tree_vertex();
        let x = g.point_on_edge(&base, 0, ratio(1, 2)); // midpoint of a-edge
        let y = g.point_on_edge(&base, 2, ratio(1, 2)); // midpoint of b-edge
        assert_eq!(g.distance(&x, &y), rat(1));
        let x2 = g.point_on_edge(&base, 0, ratio(3, 4));
        assert_eq!(g.distance(&x, &x2), ratio(1, 4));
        assert_eq!(g.distance(&x, &TreePoint::base(&g)), ratio(1, 2));
    }
}
