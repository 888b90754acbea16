//! Coupling trees: the order in which qubit spins are added together.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cg::triangle;
use crate::error::{Error, Result};
use crate::halfint::HalfInt;

/// An unlabeled binary tree over qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeShape {
    Leaf(usize),
    Join(Box<TreeShape>, Box<TreeShape>),
}

impl TreeShape {
    pub fn join(left: TreeShape, right: TreeShape) -> Self {
        TreeShape::Join(Box::new(left), Box::new(right))
    }

    /// `((((0, 1), 2), 3), ...)`: qubits added one at a time.
    pub fn chain(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTree("a chain needs at least one qubit".into()));
        }
        Ok((1..n).fold(TreeShape::Leaf(0), |acc, q| TreeShape::join(acc, TreeShape::Leaf(q))))
    }

    /// Five spins: `L = {0, 1}`, `LC = L + {2}`, `R = {3, 4}`, root `LC + R`.
    pub fn bowtie() -> Self {
        use TreeShape::Leaf;
        let l = TreeShape::join(Leaf(0), Leaf(1));
        let lc = TreeShape::join(l, Leaf(2));
        let r = TreeShape::join(Leaf(3), Leaf(4));
        TreeShape::join(lc, r)
    }

    pub fn qubits(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_qubits(&mut out);
        out
    }

    fn collect_qubits(&self, out: &mut Vec<usize>) {
        match self {
            TreeShape::Leaf(q) => out.push(*q),
            TreeShape::Join(a, b) => {
                a.collect_qubits(out);
                b.collect_qubits(out);
            }
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            TreeShape::Leaf(_) => 1,
            TreeShape::Join(a, b) => a.n_qubits() + b.n_qubits(),
        }
    }

    /// Leaves must cover `0..n` exactly once.
    pub fn validate(&self) -> Result<()> {
        check_permutation(&self.qubits())
    }

    fn labelings(&self) -> Vec<CouplingTree> {
        match self {
            TreeShape::Leaf(q) => vec![CouplingTree::Leaf(*q)],
            TreeShape::Join(a, b) => {
                let lefts = a.labelings();
                let rights = b.labelings();
                let mut out = Vec::new();
                for left in &lefts {
                    for right in &rights {
                        let (l1, l2) = (left.spin(), right.spin());
                        let mut l = (l1 - l2).abs();
                        while l <= l1 + l2 {
                            out.push(CouplingTree::node(left.clone(), right.clone(), l));
                            l = l + HalfInt::ONE;
                        }
                    }
                }
                out
            }
        }
    }
}

fn check_permutation(qubits: &[usize]) -> Result<()> {
    let n = qubits.len();
    let mut seen = vec![false; n];
    for &q in qubits {
        if q >= n || seen[q] {
            return Err(Error::InvalidTree(format!("leaves {qubits:?} are not a permutation of 0..{n}")));
        }
        seen[q] = true;
    }
    Ok(())
}

/// A coupling tree whose internal nodes carry their total spin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CouplingTree {
    Leaf(usize),
    Node { left: Box<CouplingTree>, right: Box<CouplingTree>, l: HalfInt },
}

impl CouplingTree {
    pub fn node(left: CouplingTree, right: CouplingTree, l: HalfInt) -> Self {
        CouplingTree::Node { left: Box::new(left), right: Box::new(right), l }
    }

    /// Chain tree from the intermediate spins `l^(2), ..., l^(n)`; an empty
    /// slice is the single qubit.
    pub fn chain(spins: &[HalfInt]) -> Result<Self> {
        let shape = TreeShape::chain(spins.len() + 1)?;
        Self::from_shape(&shape, spins)
    }

    /// Bowtie tree labeled `(l_L, l_LC, l_R, l)`.
    pub fn bowtie(l_left: HalfInt, l_left_center: HalfInt, l_right: HalfInt, l: HalfInt) -> Result<Self> {
        Self::from_shape(&TreeShape::bowtie(), &[l_left, l_left_center, l_right, l])
    }

    /// Labels a shape from spins listed in post-order (children before parents,
    /// left before right).
    pub fn from_shape(shape: &TreeShape, spins: &[HalfInt]) -> Result<Self> {
        let mut rest = spins;
        let tree = Self::label(shape, &mut rest)?;
        if !rest.is_empty() {
            return Err(Error::InvalidTree(format!("{} labels left over for this shape", rest.len())));
        }
        tree.validate()?;
        Ok(tree)
    }

    fn label(shape: &TreeShape, spins: &mut &[HalfInt]) -> Result<Self> {
        match shape {
            TreeShape::Leaf(q) => Ok(CouplingTree::Leaf(*q)),
            TreeShape::Join(a, b) => {
                let left = Self::label(a, spins)?;
                let right = Self::label(b, spins)?;
                let (&l, tail) =
                    spins.split_first().ok_or_else(|| Error::InvalidTree("too few labels for this shape".into()))?;
                *spins = tail;
                Ok(CouplingTree::node(left, right, l))
            }
        }
    }

    /// Total spin of the subtree; leaves are spin one-half.
    pub fn spin(&self) -> HalfInt {
        match self {
            CouplingTree::Leaf(_) => HalfInt::HALF,
            CouplingTree::Node { l, .. } => *l,
        }
    }

    pub fn shape(&self) -> TreeShape {
        match self {
            CouplingTree::Leaf(q) => TreeShape::Leaf(*q),
            CouplingTree::Node { left, right, .. } => TreeShape::join(left.shape(), right.shape()),
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        self.shape().qubits()
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            CouplingTree::Leaf(_) => 1,
            CouplingTree::Node { left, right, .. } => left.n_qubits() + right.n_qubits(),
        }
    }

    /// Internal-node spins in post-order.
    pub fn labels(&self) -> Vec<HalfInt> {
        self.internal_nodes().into_iter().map(|(_, l)| l).collect()
    }

    /// `(qubits under the node, spin)` for every internal node, post-order;
    /// the root comes last.
    pub fn internal_nodes(&self) -> Vec<(Vec<usize>, HalfInt)> {
        let mut out = Vec::new();
        self.collect_nodes(&mut out);
        out
    }

    fn collect_nodes(&self, out: &mut Vec<(Vec<usize>, HalfInt)>) {
        if let CouplingTree::Node { left, right, l } = self {
            left.collect_nodes(out);
            right.collect_nodes(out);
            out.push((self.qubits(), *l));
        }
    }

    /// Checks the leaf permutation and every node's triangle rule.
    pub fn validate(&self) -> Result<()> {
        check_permutation(&self.qubits())?;
        self.check_triangles()
    }

    fn check_triangles(&self) -> Result<()> {
        if let CouplingTree::Node { left, right, l } = self {
            left.check_triangles()?;
            right.check_triangles()?;
            let (l1, l2) = (left.spin(), right.spin());
            if l.twice() < 0 {
                return Err(Error::NegativeSpin(*l));
            }
            if !triangle(l1, l2, *l) {
                return Err(Error::Triangle { l1, l2, l: *l });
            }
        }
        Ok(())
    }

    /// Allowed projections `-l, ..., l` of the root.
    pub fn m_values(&self) -> impl Iterator<Item = HalfInt> + Clone {
        self.spin().projections()
    }

    /// Number of `(labels, m)` states carried by this labeling.
    pub fn multiplicity(&self) -> usize {
        (self.spin().twice() + 1) as usize
    }
}

/// Every labeling of `shape` obeying the triangle rule, sorted
/// lexicographically by the post-order twice-values of the labels.
pub fn enumerate_labelings(shape: &TreeShape) -> Result<Vec<CouplingTree>> {
    shape.validate()?;
    let mut all = shape.labelings();
    all.sort_by_key(|t| t.labels().iter().map(|l| l.twice()).collect::<Vec<_>>());
    Ok(all)
}

/// `(labeling, m)` pairs, labelings in `enumerate_labelings` order and `m`
/// ascending within each.
pub fn enumerate_states(shape: &TreeShape) -> Result<Vec<(CouplingTree, HalfInt)>> {
    Ok(enumerate_labelings(shape)?
        .into_iter()
        .flat_map(|t| {
            let ms: Vec<HalfInt> = t.m_values().collect();
            ms.into_iter().map(move |m| (t.clone(), m))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn state_counts() {
        let count = |shape: &TreeShape| enumerate_states(shape).unwrap().len();
        assert_eq!(count(&TreeShape::Leaf(0)), 2);
        assert_eq!(count(&TreeShape::chain(2).unwrap()), 4);
        assert_eq!(count(&TreeShape::chain(3).unwrap()), 8);
        assert_eq!(count(&TreeShape::chain(5).unwrap()), 32);
        assert_eq!(count(&TreeShape::bowtie()), 32);
    }

    #[test]
    fn chain_three_order() {
        let labels: Vec<Vec<i32>> = enumerate_labelings(&TreeShape::chain(3).unwrap())
            .unwrap()
            .iter()
            .map(|t| t.labels().iter().map(|l| l.twice()).collect())
            .collect();
        assert_eq!(labels, [vec![0, 1], vec![2, 1], vec![2, 3]]);
    }

    #[test]
    fn states_span_the_register() {
        assert_eq!(enumerate_labelings(&TreeShape::chain(4).unwrap()).unwrap().len(), 6);
        let states = enumerate_states(&TreeShape::chain(4).unwrap()).unwrap();
        assert_eq!(states.len(), 16);
    }

    #[test]
    fn rejects_bad_trees() {
        let dup = TreeShape::join(TreeShape::Leaf(0), TreeShape::Leaf(0));
        assert!(dup.validate().is_err());
        assert!(matches!(CouplingTree::chain(&[h(2), h(5)]), Err(Error::Triangle { .. })));
        assert!(CouplingTree::chain(&[h(2)]).is_ok());
        assert!(CouplingTree::from_shape(&TreeShape::chain(3).unwrap(), &[h(2)]).is_err());
    }

    #[test]
    fn bowtie_nodes() {
        let t = CouplingTree::bowtie(h(0), h(1), h(2), h(1)).unwrap();
        let nodes = t.internal_nodes();
        assert_eq!(nodes[0].0, [0, 1]);
        assert_eq!(nodes[1].0, [0, 1, 2]);
        assert_eq!(nodes[2].0, [3, 4]);
        assert_eq!(nodes[3].0, [0, 1, 2, 3, 4]);
        assert_eq!(t.labels(), [h(0), h(1), h(2), h(1)]);
    }
}
