//! Conjugacy classification of the vertex-chain stabilizer subgroups.
//!
//! The neutral loop group acts on the local diagram through a four-element
//! group Ξ of diagram automorphisms, and conjugacy classes of the standard
//! chain stabilizers correspond to Ξ-orbits of nonempty vertex subsets. The
//! diagram action is not hard-coded: it is derived from the two distinguished
//! alcove-stabilizing group elements by letting them act on explicit diagonal
//! lattice representatives of the diagram vertices and identifying the image
//! lattice up to homothety and duality. Derived case tables, the group order
//! (cyclic of order four in odd half-rank, Klein four-group in even), and a
//! Burnside orbit-count oracle are pinned down in the tests.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::weyl::{special_elements, validate_rank, AffineElement};

/// A vertex of the local diagram: the two hyperspecial pairs at either end
/// and the middle chain vertices `2 ..= n−2`; `n + 1` vertices in all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DynkinVertex {
    /// The standard-lattice vertex `0`.
    Zero,
    /// Its hyperspecial partner `0′`.
    ZeroPrime,
    /// A middle vertex `i` with `2 ≤ i ≤ n − 2`.
    Middle(usize),
    /// The half-lattice vertex `n`.
    N,
    /// Its hyperspecial partner `n′`.
    NPrime,
}

impl std::fmt::Display for DynkinVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DynkinVertex::Zero => f.write_str("0"),
            DynkinVertex::ZeroPrime => f.write_str("0'"),
            DynkinVertex::Middle(i) => write!(f, "{i}"),
            DynkinVertex::N => f.write_str("n"),
            DynkinVertex::NPrime => f.write_str("n'"),
        }
    }
}

/// The diagram vertex list for half-rank `n`, in canonical order.
pub fn dynkin_vertices(n: usize) -> Result<Vec<DynkinVertex>> {
    validate_rank(n)?;
    let mut out = vec![DynkinVertex::Zero, DynkinVertex::ZeroPrime];
    out.extend((2..=n - 2).map(DynkinVertex::Middle));
    out.push(DynkinVertex::N);
    out.push(DynkinVertex::NPrime);
    Ok(out)
}

/// A diagonal lattice, recorded by its coordinate scaling exponents: entry
/// `v_j` scales the `j`-th basis line by the `v_j`-th inverse power of the
/// uniformizer.
type LatticeVec = Vec<i64>;

/// Shift a lattice vector so its minimum entry is zero (the homothety
/// normal form).
fn normalize_lattice(v: &[i64]) -> LatticeVec {
    let min = v.iter().copied().min().expect("nonempty lattice vector");
    v.iter().map(|&x| x - min).collect()
}

/// The dual lattice under the split pairing: reversed and negated exponents.
fn dual_lattice(v: &[i64]) -> LatticeVec {
    v.iter().rev().map(|&x| -x).collect()
}

/// The homothety-and-duality class of a lattice vector, as the set of its
/// normal forms.
fn lattice_class(v: &[i64]) -> BTreeSet<LatticeVec> {
    [normalize_lattice(v), normalize_lattice(&dual_lattice(v))].into_iter().collect()
}

/// Explicit diagonal lattice representatives for the diagram vertices, in
/// the order of [`dynkin_vertices`].
fn vertex_lattices(n: usize) -> Result<Vec<LatticeVec>> {
    let d = 2 * n;
    Ok(dynkin_vertices(n)?
        .into_iter()
        .map(|vtx| {
            let mut v = vec![0i64; d];
            match vtx {
                DynkinVertex::Zero => {}
                DynkinVertex::ZeroPrime => {
                    v[0] = 1;
                    v[d - 1] = -1;
                }
                DynkinVertex::Middle(i) => v[..i].fill(1),
                DynkinVertex::N => v[..n].fill(1),
                DynkinVertex::NPrime => {
                    v[..n - 1].fill(1);
                    v[n] = 1;
                }
            }
            v
        })
        .collect())
}

/// The image of a diagonal lattice under a group element `t^r σ`: the basis
/// line at `σ(j)` acquires the exponent `v_j − r_{σ(j)}`.
fn lattice_image(w: &AffineElement, v: &[i64]) -> LatticeVec {
    let moved = w.w0().permute_vec(v);
    moved.iter().zip(w.t().as_slice()).map(|(&a, &r)| a - r).collect()
}

/// The outer-automorphism group of the local diagram: a four-element
/// permutation group derived from the two distinguished alcove stabilizers.
#[derive(Debug, Clone)]
pub struct XiGroup {
    n: usize,
    vertices: Vec<DynkinVertex>,
    /// Image positions under the first generator (the hyperspecial flip).
    tau1: Vec<usize>,
    /// Image positions under the second generator (the end-to-end rotation).
    tau2: Vec<usize>,
    /// The full element list, identity first, sorted.
    elements: Vec<Vec<usize>>,
}

/// Derive the diagram action of the outer-automorphism group at half-rank
/// `n` from the group elements themselves.
pub fn xi_group(n: usize) -> Result<XiGroup> {
    validate_rank(n)?;
    let vertices = dynkin_vertices(n)?;
    let reps = vertex_lattices(n)?;
    let classes: Vec<BTreeSet<LatticeVec>> = reps.iter().map(|v| lattice_class(v)).collect();
    let identify = |v: &[i64]| -> usize {
        let class = lattice_class(v);
        let hits: Vec<usize> =
            (0..classes.len()).filter(|&p| !classes[p].is_disjoint(&class)).collect();
        assert_eq!(
            hits.len(),
            1,
            "a lattice image must match exactly one diagram vertex class"
        );
        hits[0]
    };
    let special = special_elements(n)?;
    let diagram_perm = |w: &AffineElement| -> Vec<usize> {
        reps.iter().map(|v| identify(&lattice_image(w, v))).collect()
    };
    let tau1 = diagram_perm(&special.tau1);
    let tau2 = diagram_perm(&special.tau2);

    // Close the generators into a group of permutations.
    let id: Vec<usize> = (0..vertices.len()).collect();
    let compose =
        |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&p| a[p]).collect() };
    let mut elements: BTreeSet<Vec<usize>> = [id.clone(), tau1.clone(), tau2.clone()].into();
    loop {
        let mut fresh = Vec::new();
        for a in &elements {
            for b in &elements {
                let c = compose(a, b);
                if !elements.contains(&c) {
                    fresh.push(c);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        elements.extend(fresh);
    }
    let mut elements: Vec<Vec<usize>> = elements.into_iter().collect();
    elements.sort();
    assert_eq!(elements.len(), 4, "the diagram action closes in a group of order four");
    Ok(XiGroup { n, vertices, tau1, tau2, elements })
}

impl XiGroup {
    /// Half-rank `n`.
    pub fn rank(&self) -> usize {
        self.n
    }

    /// The diagram vertices, in the order the permutations are indexed by.
    pub fn vertices(&self) -> &[DynkinVertex] {
        &self.vertices
    }

    /// The group order.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// All elements, as image-position tables.
    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    /// The first generator: the hyperspecial flip.
    pub fn tau1(&self) -> &[usize] {
        &self.tau1
    }

    /// The second generator: the end-to-end rotation.
    pub fn tau2(&self) -> &[usize] {
        &self.tau2
    }

    /// Whether the group is cyclic (has an element of order four).
    pub fn is_cyclic(&self) -> bool {
        let id: Vec<usize> = (0..self.vertices.len()).collect();
        self.elements.iter().any(|e| {
            let sq: Vec<usize> = e.iter().map(|&p| e[p]).collect();
            sq != id
        })
    }

    /// The image of a vertex-position subset under one element.
    pub fn act(&self, element: &[usize], subset: &BTreeSet<usize>) -> BTreeSet<usize> {
        subset.iter().map(|&p| element[p]).collect()
    }

    /// The canonical (lexicographically least) member of a subset's orbit.
    pub fn orbit_representative(&self, subset: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.elements
            .iter()
            .map(|e| self.act(e, subset))
            .min()
            .expect("the group is nonempty")
    }

    /// Convert a position subset to labeled vertices.
    pub fn label_subset(&self, subset: &BTreeSet<usize>) -> BTreeSet<DynkinVertex> {
        subset.iter().map(|&p| self.vertices[p]).collect()
    }
}

/// Canonical representatives of the orbits of nonempty diagram-vertex
/// subsets, classifying the chain stabilizers up to conjugacy.
pub fn conjugacy_classes(n: usize) -> Result<Vec<BTreeSet<DynkinVertex>>> {
    let xi = xi_group(n)?;
    let count = xi.vertices().len();
    let mut reps: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for mask in 1u32..1 << count {
        let subset: BTreeSet<usize> = (0..count).filter(|p| mask >> p & 1 == 1).collect();
        reps.insert(xi.orbit_representative(&subset));
    }
    Ok(reps.into_iter().map(|s| xi.label_subset(&s)).collect())
}

/// The orbit count of nonempty subsets by the Burnside lemma: average the
/// number of fixed subsets (two to the cycle count) over the group, then
/// drop the empty orbit.
pub fn conjugacy_class_count_burnside(n: usize) -> Result<usize> {
    let xi = xi_group(n)?;
    let count = xi.vertices().len();
    let mut total = 0usize;
    for e in xi.elements() {
        let mut seen = vec![false; count];
        let mut cycles = 0usize;
        for start in 0..count {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = e[p];
            }
        }
        total += 1usize << cycles;
    }
    Ok(total / xi.order() - 1)
}

/// The classes of maximal stabilizers: orbit representatives of the
/// singleton subsets.
pub fn maximal_classes(n: usize) -> Result<Vec<BTreeSet<DynkinVertex>>> {
    let xi = xi_group(n)?;
    let mut reps: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for p in 0..xi.vertices().len() {
        reps.insert(xi.orbit_representative(&BTreeSet::from([p])));
    }
    Ok(reps.into_iter().map(|s| xi.label_subset(&s)).collect())
}

/// Canonical representative of a nonempty chain-index set `I ⊆ [0, n]` under
/// the end-to-end symmetry `i ↦ n − i`: the lexicographically smaller of the
/// set and its mirror. Used to deduplicate verification work across
/// equivalent index sets.
pub fn normalize_index(indices: &BTreeSet<usize>, n: usize) -> Result<BTreeSet<usize>> {
    validate_rank(n)?;
    if indices.is_empty() {
        return Err(Error::InvalidIndex("the index set must be nonempty".into()));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i > n) {
        return Err(Error::InvalidIndex(format!("chain index {bad} out of range 0..={n}")));
    }
    let mirrored: BTreeSet<usize> = indices.iter().map(|&i| n - i).collect();
    Ok(indices.clone().min(mirrored))
}
