//! Base alcove combinatorics: simple reflections, length, Bruhat order,
//! admissible sets, vertex stabilizers and canonical double cosets.
//!
//! The affine Weyl group `W_aff` (type `D̃_n`) acts on the `y`-coordinates
//! `y_k = r_k − c/2` (`k ≤ n`, `c` the common pair sum) of the similitude
//! lattice. The base alcove is the simplex cut out by
//!
//! ```text
//! y_1 + y_2 > −1,   y_1 < y_2 < … < y_n,   y_{n−1} + y_n < 0,
//! ```
//!
//! with the `n + 1` vertices labelled by the local Dynkin diagram
//! (`0, 0′, 2, …, n−2, n, n′`). The extended group splits as
//! `W_aff ⋊ Ω°` where `Ω°` is the alcove stabilizer, reached from the
//! distinguished elements `τ₁, τ₂` of [`crate::weyl::special_elements`];
//! the Kottwitz invariant is injective on `Ω°`, which gives the canonical
//! section used for Bruhat comparisons.
//!
//! Everything here is exact integer arithmetic: points are stored at a fixed
//! even scale so the half-integral vertices and barycenters stay integral.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::weyl::{
    dynkin_labels, kottwitz, special_elements, star, validate_rank, vertex_doubled,
    AffineElement, KottwitzValue, SignedPerm, TransVec, VertexLabel,
};

/// A simple affine reflection, labelled by the unique base-alcove vertex it
/// moves (it fixes the wall spanned by all the other vertices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleReflection {
    /// The Dynkin vertex opposite the fixed wall.
    pub label: VertexLabel,
    /// The reflection as a group element.
    pub element: AffineElement,
}

/// Shared per-rank data: the simple reflections and a scaled interior point
/// of the base alcove (its barycenter), used by every length computation.
struct AlcoveData {
    simples: Vec<SimpleReflection>,
    /// `scale · barycenter` in `y`-coordinates (length `n`).
    interior: Vec<i64>,
    /// The common denominator `2(n + 1)`.
    scale: i64,
}

fn build_alcove_data(n: usize) -> Result<AlcoveData> {
    validate_rank(n)?;
    let d = 2 * n;

    let mut simples = Vec::with_capacity(n + 1);

    // Reflection in the wall y_1 + y_2 = −1.
    let mut t = vec![0i64; d];
    t[0] = -1;
    t[1] = -1;
    t[d - 2] = 1;
    t[d - 1] = 1;
    simples.push(SimpleReflection {
        label: VertexLabel::Chain(0),
        element: AffineElement::from_parts(
            TransVec::from_vec(t)?,
            SignedPerm::pair_swap(n, 1, 2 * n - 1)?,
        )?,
    });
    // Reflection in the wall y_1 = y_2.
    simples.push(SimpleReflection {
        label: VertexLabel::Prime(0),
        element: AffineElement::from_perm(SignedPerm::pair_swap(n, 1, 2)?),
    });
    // Reflections in the walls y_i = y_{i+1}.
    for i in 2..=n - 2 {
        simples.push(SimpleReflection {
            label: VertexLabel::Chain(i),
            element: AffineElement::from_perm(SignedPerm::pair_swap(n, i, i + 1)?),
        });
    }
    // Reflection in the wall y_{n−1} + y_n = 0.
    simples.push(SimpleReflection {
        label: VertexLabel::Chain(n),
        element: AffineElement::from_perm(SignedPerm::pair_swap(n, n - 1, n + 1)?),
    });
    // Reflection in the wall y_{n−1} = y_n.
    simples.push(SimpleReflection {
        label: VertexLabel::Prime(n),
        element: AffineElement::from_perm(SignedPerm::pair_swap(n, n - 1, n)?),
    });
    simples.sort_by_key(|s| s.label);

    // Barycenter of the n + 1 vertices, scaled by 2(n + 1): every base-alcove
    // vertex has pair sum 0, so its y-coordinates are the first n doubled
    // coordinates, and summing them over the vertices gives the barycenter at
    // exactly this scale.
    let mut interior = vec![0i64; n];
    for label in dynkin_labels(n) {
        let v = vertex_doubled(label, n)?;
        debug_assert_eq!(v[0] + v[d - 1], 0);
        for k in 0..n {
            interior[k] += v[k];
        }
    }
    Ok(AlcoveData { simples, interior, scale: 2 * (n as i64 + 1) })
}

fn alcove_data(n: usize) -> Result<Arc<AlcoveData>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<AlcoveData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("alcove cache poisoned");
    if let Some(data) = guard.get(&n) {
        return Ok(data.clone());
    }
    let data = Arc::new(build_alcove_data(n)?);
    guard.insert(n, data.clone());
    Ok(data)
}

/// The `n + 1` simple reflections of `W_aff`, sorted by vertex label.
pub fn simple_reflections(n: usize) -> Result<Vec<SimpleReflection>> {
    Ok(alcove_data(n)?.simples.clone())
}

/// Image of a scaled `y`-point under `w`: the permutation part acts by the
/// induced signed permutation of the `y`-coordinates and the translation part
/// shifts by `t_k − c_t/2`.
fn y_transform_scaled(w: &AffineElement, y: &[i64], scale: i64) -> Vec<i64> {
    let n = w.rank();
    debug_assert_eq!(y.len(), n);
    debug_assert_eq!(scale % 2, 0);
    let inv = w.w0().inverse();
    let ct = w.t().similitude();
    let mut out = vec![0i64; n];
    for k in 1..=n {
        let j = inv.image(k);
        let lin = if j <= n { y[j - 1] } else { -y[star(j, n) - 1] };
        out[k - 1] = lin + scale * w.t().entry(k) - (scale / 2) * ct;
    }
    out
}

/// Iwahori–Matsumoto length on the neutral component: the number of affine
/// root hyperplanes (`⟨e_a ± e_b, y⟩ ∈ Z`, `a < b ≤ n`) separating a generic
/// interior point of the base alcove from its image.
///
/// The alcove-stabilizer part of an element crosses no hyperplane, so this
/// computes the length of the `W_aff`-part directly.
pub fn length(w: &AffineElement) -> Result<usize> {
    if !w.is_neutral() {
        return Err(Error::OddComponent);
    }
    let n = w.rank();
    let data = alcove_data(n)?;
    let m = data.scale;
    let y1 = y_transform_scaled(w, &data.interior, m);
    let mut total = 0usize;
    for a in 0..n {
        for b in a + 1..n {
            for sign in [1i64, -1] {
                let f0 = data.interior[a] + sign * data.interior[b];
                let f1 = y1[a] + sign * y1[b];
                debug_assert!(
                    f0.rem_euclid(m) != 0 && f1.rem_euclid(m) != 0,
                    "interior point lies on a root hyperplane"
                );
                let (lo, hi) = if f0 <= f1 { (f0, f1) } else { (f1, f0) };
                total += (hi.div_euclid(m) - lo.div_euclid(m)) as usize;
            }
        }
    }
    Ok(total)
}

/// Breadth-first length oracle: the ball of radius `max_len` around the
/// identity under right multiplication by simple reflections, with exact
/// word-length distances. Independent of [`length`]; used to validate it.
pub fn length_ball_bfs(n: usize, max_len: usize) -> Result<Vec<(AffineElement, usize)>> {
    let data = alcove_data(n)?;
    let mut dist: HashMap<AffineElement, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let e = AffineElement::identity(n);
    dist.insert(e.clone(), 0);
    queue.push_back(e);
    while let Some(w) = queue.pop_front() {
        let dw = dist[&w];
        if dw == max_len {
            continue;
        }
        for s in &data.simples {
            let next = w.multiply(&s.element);
            if !dist.contains_key(&next) {
                dist.insert(next.clone(), dw + 1);
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<_> = dist.into_iter().collect();
    out.sort();
    Ok(out)
}

/// An element of `Ω°`, the stabilizer of the base alcove inside the neutral
/// component, in the normal form `τ₂^z · τ₁^p`.
///
/// The Kottwitz invariant restricts to an isomorphism `Ω° ≅ Z ⊕ Z/2` sending
/// this normal form to `(z, p)`, which is what makes the form canonical; the
/// central translation `t^{(1,…,1)}` is `τ₂² · τ₁^{n mod 2}` in this form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaElement {
    z: i64,
    parity: bool,
    element: AffineElement,
}

impl OmegaElement {
    /// The identity of `Ω°`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_kottwitz(KottwitzValue::zero(), n)
    }

    /// The element `τ₂^z · τ₁^p` with Kottwitz invariant `(z, p)`.
    pub fn from_kottwitz(k: KottwitzValue, n: usize) -> Result<Self> {
        let specials = special_elements(n)?;
        let mut element = specials.tau2.pow(k.z);
        if k.parity {
            element = element.multiply(&specials.tau1);
        }
        debug_assert_eq!(kottwitz(&element).expect("section lands in the neutral component"), k);
        Ok(OmegaElement { z: k.z, parity: k.parity, element })
    }

    /// The underlying group element.
    pub fn element(&self) -> &AffineElement {
        &self.element
    }

    /// The Kottwitz invariant `(z, parity)` of this element.
    pub fn kottwitz_value(&self) -> KottwitzValue {
        KottwitzValue { z: self.z, parity: self.parity }
    }
}

/// Split a neutral-component element as `w = u · ω` with `u ∈ W_aff` and
/// `ω ∈ Ω°` the canonical section of the Kottwitz invariant.
pub fn omega_split(w: &AffineElement) -> Result<(AffineElement, OmegaElement)> {
    let k = kottwitz(w)?;
    let omega = OmegaElement::from_kottwitz(k, w.rank())?;
    let u = w.multiply(&omega.element().inverse());
    assert!(
        u.in_w_aff(),
        "Kottwitz section failed to split off the alcove-stabilizer part"
    );
    Ok((u, omega))
}

/// A reduced word for an element of `W_aff`, as a sequence of simple
/// reflection labels (leftmost letter first), extracted by repeatedly
/// removing left descents.
pub fn reduced_word(u: &AffineElement) -> Result<Vec<VertexLabel>> {
    if !u.in_w_aff() {
        return Err(Error::InvalidIndex(
            "reduced words are computed for affine Weyl group elements only".into(),
        ));
    }
    let n = u.rank();
    let data = alcove_data(n)?;
    let mut word = Vec::new();
    let mut rest = u.clone();
    let mut len = length(&rest)?;
    while len > 0 {
        let mut found = false;
        for s in &data.simples {
            let cand = s.element.multiply(&rest);
            let cand_len = length(&cand)?;
            if cand_len < len {
                word.push(s.label);
                rest = cand;
                len = cand_len;
                found = true;
                break;
            }
        }
        assert!(found, "no left descent found for a positive-length element");
    }
    Ok(word)
}

/// Bruhat order on the neutral component: `x ≤ y` iff the two elements have
/// the same alcove-stabilizer part and the `W_aff`-parts compare in the
/// Bruhat order of `W_aff`. Elements in different `W_aff`-cosets are
/// incomparable (`false`), not an error.
///
/// The `W_aff` comparison uses the lifting property: for a left descent `s`
/// of `y`, `x ≤ y` iff `sx ≤ sy` (when `s` is also a descent of `x`) or
/// `x ≤ sy` (otherwise).
pub fn bruhat_leq(x: &AffineElement, y: &AffineElement) -> Result<bool> {
    let kx = kottwitz(x)?;
    let ky = kottwitz(y)?;
    if kx != ky {
        return Ok(false);
    }
    let (mut u, _) = omega_split(x)?;
    let (mut v, _) = omega_split(y)?;
    let data = alcove_data(x.rank())?;
    loop {
        if u == v {
            return Ok(true);
        }
        let lv = length(&v)?;
        let lu = length(&u)?;
        if lu >= lv {
            return Ok(false);
        }
        // lv > lu >= 0, so v has a left descent.
        let mut applied = false;
        for s in &data.simples {
            let sv = s.element.multiply(&v);
            if length(&sv)? < lv {
                let su = s.element.multiply(&u);
                if length(&su)? < lu {
                    u = su;
                }
                v = sv;
                applied = true;
                break;
            }
        }
        assert!(applied, "no left descent found for a positive-length element");
    }
}

/// Whether `g` is an affine reflection of `W_aff`: its permutation part is
/// the reflection in a root `e_a ± e_b` of the `y`-coordinates and its
/// translation part is an integer multiple of the corresponding coroot.
pub fn is_affine_reflection(g: &AffineElement) -> bool {
    if !g.in_w_aff() {
        return false;
    }
    let n = g.rank();
    for a in 1..=n {
        for b in a + 1..=n {
            for minus in [true, false] {
                let perm = if minus {
                    SignedPerm::pair_swap(n, a, b)
                } else {
                    SignedPerm::pair_swap(n, a, star(b, n))
                }
                .expect("root reflections are valid pair swaps");
                if *g.w0() != perm {
                    continue;
                }
                // Translation must be k · α^∨ on the y-coordinates: entries
                // (a, b) equal to (k, ∓k), all other first-half entries 0.
                let t = g.t();
                let k = t.entry(a);
                let matches = (1..=n).all(|j| {
                    let expect = if j == a {
                        k
                    } else if j == b {
                        if minus {
                            -k
                        } else {
                            k
                        }
                    } else {
                        0
                    };
                    t.entry(j) == expect
                });
                if matches {
                    return true;
                }
            }
        }
    }
    false
}

/// Whether `y` covers `x` in Bruhat order: lengths differ by one and the
/// quotient `y·x^{-1}` is an affine reflection. Used as the independent
/// cover-relation oracle for [`bruhat_leq`].
pub fn is_bruhat_cover(x: &AffineElement, y: &AffineElement) -> Result<bool> {
    let lx = length(x)?;
    let ly = length(y)?;
    if ly != lx + 1 {
        return Ok(false);
    }
    Ok(is_affine_reflection(&y.multiply(&x.inverse())))
}

/// A minuscule-type cocharacter: a 0/1 translation vector with constant pair
/// sums. The two distinguished ones are [`Cochar::plus`] and
/// [`Cochar::minus`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cochar(TransVec);

impl Cochar {
    /// `μ+ = (1^{(n)}, 0^{(n)})`.
    pub fn plus(n: usize) -> Result<Self> {
        validate_rank(n)?;
        let v: Vec<i64> =
            std::iter::repeat_n(1, n).chain(std::iter::repeat_n(0, n)).collect();
        Cochar::from_trans(TransVec::from_vec(v)?)
    }

    /// `μ− = (1^{(n−1)}, 0, 1, 0^{(n−1)})`.
    pub fn minus(n: usize) -> Result<Self> {
        validate_rank(n)?;
        let mut v = vec![0i64; 2 * n];
        v[..n - 1].fill(1);
        v[n] = 1;
        Cochar::from_trans(TransVec::from_vec(v)?)
    }

    /// Build from a translation vector, validating the 0/1 shape.
    pub fn from_trans(t: TransVec) -> Result<Self> {
        if t.as_slice().iter().any(|&x| x != 0 && x != 1) {
            return Err(Error::InvalidCochar);
        }
        Ok(Cochar(t))
    }

    /// The underlying translation vector.
    pub fn vec(&self) -> &TransVec {
        &self.0
    }

    /// Whether `μ + μ* = 1` entrywise (equivalently, pair sums equal 1).
    pub fn is_self_dual(&self) -> bool {
        self.0.similitude() == 1
    }

    /// The spin parity `Σ_{j ≤ n} μ_j mod 2`.
    pub fn epsilon(&self) -> bool {
        self.0.half_sum_parity()
    }
}

/// The orbit of a cocharacter under the even signed permutation group
/// `S°_{2n}`, enumerated directly and returned sorted.
pub fn weyl_orbit(mu: &Cochar) -> Vec<TransVec> {
    let n = mu.vec().rank();
    let mut orbit = BTreeSet::new();
    for sigma in crate::weyl::enumerate_circ(n) {
        let moved = sigma.permute_vec(mu.vec().as_slice());
        orbit.insert(TransVec::from_vec(moved).expect("orbit preserves the similitude constraint"));
    }
    orbit.into_iter().collect()
}

/// The admissible set `Adm(μ)`: all neutral-component elements below some
/// conjugate translation `t^{σμ}` in Bruhat order.
///
/// Computed as the union over orbit extremes `λ ∈ S°_{2n}·μ` of the sets of
/// subword products of a fixed reduced word of the `W_aff`-part of `t^λ`,
/// times the common alcove-stabilizer part. Returned sorted.
pub fn admissible_set(mu: &Cochar, n: usize) -> Result<Vec<AffineElement>> {
    validate_rank(n)?;
    if mu.vec().rank() != n {
        return Err(Error::VectorLength { expected: 2 * n, got: mu.vec().degree() });
    }
    if !mu.is_self_dual() {
        return Err(Error::InvalidCochar);
    }
    let data = alcove_data(n)?;
    let omega = {
        let t = AffineElement::translation(mu.vec().clone());
        omega_split(&t)?.1
    };
    let mut seen: HashSet<AffineElement> = HashSet::new();
    for lambda in weyl_orbit(mu) {
        let t = AffineElement::translation(lambda);
        let (u, om) = omega_split(&t)?;
        debug_assert_eq!(om, omega, "orbit extremes share the alcove-stabilizer part");
        // Subword products of a reduced word accumulate left to right:
        // after each letter the set is closed under "use it or not".
        let word = reduced_word(&u)?;
        let mut products: HashSet<AffineElement> = HashSet::new();
        products.insert(AffineElement::identity(n));
        for label in word {
            let s = &data
                .simples
                .iter()
                .find(|s| s.label == label)
                .expect("reduced word letters are simple labels")
                .element;
            let extended: Vec<AffineElement> =
                products.iter().map(|p| p.multiply(s)).collect();
            products.extend(extended);
        }
        seen.extend(products);
    }
    let mut out: Vec<AffineElement> =
        seen.into_iter().map(|u| u.multiply(omega.element())).collect();
    out.sort();
    Ok(out)
}

/// The pointwise stabilizer in `W_aff` of a set of base-alcove points,
/// generated by the simple reflections whose walls contain all the points.
///
/// For a set of chain indices `I ⊆ [0, n]` this is the parahoric group
/// `W_I = ∩_{i∈I} W_i`; single Dynkin vertices give the maximal vertex
/// groups.
#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    labels: Vec<VertexLabel>,
    gens: Vec<AffineElement>,
    elements: Vec<AffineElement>,
    keys: HashSet<u128>,
    n: usize,
}

impl StabilizerGroup {
    /// Build the stabilizer of the listed base-alcove points.
    pub fn for_points(labels: &[VertexLabel], n: usize) -> Result<Self> {
        validate_rank(n)?;
        if labels.is_empty() {
            return Err(Error::InvalidIndex("stabilizer needs at least one point".into()));
        }
        let mut sorted: Vec<VertexLabel> = labels.to_vec();
        sorted.sort();
        sorted.dedup();
        let points: Vec<Vec<i64>> = sorted
            .iter()
            .map(|&label| vertex_doubled(label, n))
            .collect::<Result<_>>()?;
        let data = alcove_data(n)?;
        let gens: Vec<AffineElement> = data
            .simples
            .iter()
            .filter(|s| points.iter().all(|p| s.element.act_doubled(p) == *p))
            .map(|s| s.element.clone())
            .collect();

        let mut keys = HashSet::new();
        let mut elements = Vec::new();
        let mut queue = VecDeque::new();
        let e = AffineElement::identity(n);
        keys.insert(e.encode());
        elements.push(e.clone());
        queue.push_back(e);
        while let Some(w) = queue.pop_front() {
            for g in &gens {
                let next = w.multiply(g);
                if keys.insert(next.encode()) {
                    elements.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        elements.sort();
        Ok(StabilizerGroup { labels: sorted, gens, elements, keys, n })
    }

    /// The stabilizer `W_I` of the chain points `a_i`, `i ∈ I ⊆ [0, n]`.
    pub fn for_chain_indices(indices: &[usize], n: usize) -> Result<Self> {
        if indices.iter().any(|&i| i > n) {
            return Err(Error::InvalidIndex(format!(
                "chain indices {indices:?} out of range 0..={n}"
            )));
        }
        let labels: Vec<VertexLabel> = indices.iter().map(|&i| VertexLabel::Chain(i)).collect();
        Self::for_points(&labels, n)
    }

    /// Sorted fixed-point labels (the quotient index).
    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    /// The generating simple reflections.
    pub fn generators(&self) -> &[AffineElement] {
        &self.gens
    }

    /// All elements, sorted.
    pub fn elements(&self) -> &[AffineElement] {
        &self.elements
    }

    /// Group order.
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Half-rank `n`.
    pub fn rank(&self) -> usize {
        self.n
    }

    /// Membership test.
    pub fn contains(&self, w: &AffineElement) -> bool {
        self.keys.contains(&w.encode())
    }

    /// Whether this group is contained in `other`.
    pub fn is_subgroup_of(&self, other: &StabilizerGroup) -> bool {
        self.elements.iter().all(|w| other.contains(w))
    }
}

/// Direct enumeration of the stabilizer of a single chain point `a_i`:
/// permutations of `S*_{2n}` that preserve the index blocks
/// `A_i = [1,i] ∪ [i*, 2n]` and `B_i = [i+1, i*−1]` with even restriction to
/// each, completed by the translation `t = a_i − σ a_i`. This is the
/// independent oracle for [`StabilizerGroup::for_chain_indices`].
pub fn stabilizer_by_enumeration(i: usize, n: usize) -> Result<Vec<AffineElement>> {
    validate_rank(n)?;
    if i > n {
        return Err(Error::InvalidIndex(format!("chain index {i} out of range 0..={n}")));
    }
    let point = vertex_doubled(VertexLabel::Chain(i), n)?;
    let a_block: Vec<usize> = (1..=i).chain(star(i, n)..=2 * n).collect();
    let b_block: Vec<usize> = (i + 1..=star(i, n) - 1).collect();
    let mut out = Vec::new();
    for sigma in crate::weyl::enumerate_star(n) {
        let moved = sigma.permute_vec(&point);
        let diff: Vec<i64> = point.iter().zip(&moved).map(|(&p, &q)| p - q).collect();
        if diff.iter().any(|&x| x % 2 != 0) {
            continue; // σ does not preserve the blocks
        }
        if !restriction_is_even(&sigma, &a_block) || !restriction_is_even(&sigma, &b_block) {
            continue;
        }
        let t = TransVec::from_vec(diff.iter().map(|&x| x / 2).collect())?;
        out.push(AffineElement::from_parts(t, sigma)?);
    }
    out.sort();
    Ok(out)
}

/// Parity of the permutation induced on a sorted index block (the block must
/// be preserved setwise).
fn restriction_is_even(sigma: &SignedPerm, block: &[usize]) -> bool {
    let images: Vec<usize> = block.iter().map(|&i| sigma.image(i)).collect();
    debug_assert!(images.iter().all(|img| block.binary_search(img).is_ok()));
    let mut inversions = 0usize;
    for x in 0..images.len() {
        for y in x + 1..images.len() {
            if images[x] > images[y] {
                inversions += 1;
            }
        }
    }
    inversions.is_multiple_of(2)
}

/// A canonicalized double coset `W_I · w · W_I`.
///
/// Two cosets are equal iff they have the same quotient index and the same
/// canonical representative; the `complete` flag (whether the full coset was
/// contained in the set it was extracted from) is metadata and does not
/// participate in comparisons.
#[derive(Debug, Clone)]
pub struct DoubleCoset {
    /// Quotient index: the fixed-point labels of the group.
    pub index: Vec<VertexLabel>,
    /// Lexicographically least element of the full coset (translation vector
    /// first, then permutation images).
    pub rep: AffineElement,
    /// Whether the full coset was contained in the source set. Cosets that
    /// merely meet the source are flagged `false`, never silently absorbed.
    pub complete: bool,
}

impl PartialEq for DoubleCoset {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.rep == other.rep
    }
}
impl Eq for DoubleCoset {}
impl PartialOrd for DoubleCoset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for DoubleCoset {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.index, &self.rep).cmp(&(&other.index, &other.rep))
    }
}
impl std::hash::Hash for DoubleCoset {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (&self.index, &self.rep).hash(state);
    }
}

/// Canonical representative of the double coset `W · x · W`: the
/// lexicographically least of the `|W|²` products `u·x·v`.
pub fn canonical_rep(x: &AffineElement, stab: &StabilizerGroup) -> AffineElement {
    let mut best = x.clone();
    for u in stab.elements() {
        let ux = u.multiply(x);
        for v in stab.elements() {
            let p = ux.multiply(v);
            if p < best {
                best = p;
            }
        }
    }
    best
}

/// Partition a finite set into double cosets of `stab`, canonicalizing each.
///
/// Works for arbitrary sets: a coset that merely meets the set is still
/// reported (with its true canonical representative, computed over the full
/// coset) but flagged `complete = false`. Cost is `O(|W|²)` per distinct
/// coset. Output is sorted by representative.
pub fn double_cosets(set: &[AffineElement], stab: &StabilizerGroup) -> Vec<DoubleCoset> {
    let index: HashMap<u128, usize> =
        set.iter().enumerate().map(|(k, w)| (w.encode(), k)).collect();
    let mut seen = vec![false; set.len()];
    let mut out = Vec::new();
    for (k, x) in set.iter().enumerate() {
        if seen[k] {
            continue;
        }
        let mut best = x.clone();
        let mut complete = true;
        for u in stab.elements() {
            let ux = u.multiply(x);
            for v in stab.elements() {
                let p = ux.multiply(v);
                if p < best {
                    best = p.clone();
                }
                match index.get(&p.encode()) {
                    Some(&pos) => seen[pos] = true,
                    None => complete = false,
                }
            }
        }
        out.push(DoubleCoset { index: stab.labels().to_vec(), rep: best, complete });
    }
    out.sort();
    out
}

/// Partition a *bi-stable* set (a union of double cosets) into its cosets by
/// generator closure. Equivalent to [`double_cosets`] on such sets but costs
/// `O(|set| · #generators)`; panics if the set is not actually stable.
pub fn double_cosets_stable(set: &[AffineElement], stab: &StabilizerGroup) -> Vec<DoubleCoset> {
    let index: HashMap<u128, usize> =
        set.iter().enumerate().map(|(k, w)| (w.encode(), k)).collect();
    let mut seen = vec![false; set.len()];
    let mut out = Vec::new();
    for (k, x) in set.iter().enumerate() {
        if seen[k] {
            continue;
        }
        let mut best = x.clone();
        seen[k] = true;
        let mut queue = VecDeque::new();
        queue.push_back(k);
        while let Some(pos) = queue.pop_front() {
            let w = &set[pos];
            for g in stab.generators() {
                for next in [g.multiply(w), w.multiply(g)] {
                    let pos = *index
                        .get(&next.encode())
                        .expect("set is not stable under the stabilizer generators");
                    if !seen[pos] {
                        seen[pos] = true;
                        if set[pos] < best {
                            best = set[pos].clone();
                        }
                        queue.push_back(pos);
                    }
                }
            }
        }
        out.push(DoubleCoset { index: stab.labels().to_vec(), rep: best, complete: true });
    }
    out.sort();
    out
}

/// Key-based variant of [`double_cosets_stable`] for very large bi-stable
/// sets: elements are passed and traversed as compact keys, so only the
/// per-coset minima are ever materialized. Panics if the set is not stable.
pub fn double_cosets_stable_keys(keys: &[u128], stab: &StabilizerGroup) -> Vec<DoubleCoset> {
    let n = stab.rank();
    let index: HashMap<u128, usize> = keys.iter().enumerate().map(|(k, &w)| (w, k)).collect();
    let mut seen = vec![false; keys.len()];
    let mut out = Vec::new();
    for (k, &start) in keys.iter().enumerate() {
        if seen[k] {
            continue;
        }
        // Numeric key order equals element order, so the minimum key is the
        // canonical representative.
        let mut best = start;
        seen[k] = true;
        let mut queue = VecDeque::new();
        queue.push_back(start);
        while let Some(key) = queue.pop_front() {
            let w = AffineElement::decode(key, n);
            for g in stab.generators() {
                for next in [g.multiply(&w), w.multiply(g)] {
                    let next_key = next.encode();
                    let pos = *index
                        .get(&next_key)
                        .expect("set is not stable under the stabilizer generators");
                    if !seen[pos] {
                        seen[pos] = true;
                        best = best.min(next_key);
                        queue.push_back(next_key);
                    }
                }
            }
        }
        out.push(DoubleCoset {
            index: stab.labels().to_vec(),
            rep: AffineElement::decode(best, n),
            complete: true,
        });
    }
    out.sort();
    out
}

/// Re-canonicalize a double coset in a coarser quotient (the projection
/// `ρ: W_I\W̃°/W_I → W_J\W̃°/W_J` for `W_I ⊆ W_J`).
pub fn project_coset(
    c: &DoubleCoset,
    source: &StabilizerGroup,
    target: &StabilizerGroup,
) -> Result<DoubleCoset> {
    if c.index != source.labels() {
        return Err(Error::InvalidIndex(
            "coset index does not match the source quotient".into(),
        ));
    }
    if !source.is_subgroup_of(target) {
        return Err(Error::InvalidIndex(
            "projection requires the source group to lie in the target group".into(),
        ));
    }
    Ok(DoubleCoset {
        index: target.labels().to_vec(),
        rep: canonical_rep(&c.rep, target),
        complete: c.complete,
    })
}

/// The saturation `W · S · W` of a finite set under a stabilizer group,
/// returned sorted and deduplicated.
pub fn saturate(set: &[AffineElement], stab: &StabilizerGroup) -> Vec<AffineElement> {
    let mut keys = HashSet::new();
    let mut out = Vec::new();
    for x in set {
        for u in stab.elements() {
            let ux = u.multiply(x);
            for v in stab.elements() {
                let p = ux.multiply(v);
                if keys.insert(p.encode()) {
                    out.push(p);
                }
            }
        }
    }
    out.sort();
    out
}

/// Generator-closure variant of [`saturate`]: breadth-first closure of the
/// set under left and right multiplication by the group generators. Yields
/// the same saturation, but the cost scales with the size of the result
/// rather than `O(|set| · |W|²)`, which matters when the group is large.
pub fn saturate_closure(set: &[AffineElement], stab: &StabilizerGroup) -> Vec<AffineElement> {
    let mut keys: HashSet<u128> = HashSet::new();
    let mut queue: VecDeque<AffineElement> = VecDeque::new();
    let mut out = Vec::new();
    for x in set {
        if keys.insert(x.encode()) {
            queue.push_back(x.clone());
            out.push(x.clone());
        }
    }
    while let Some(w) = queue.pop_front() {
        for g in stab.generators() {
            for next in [g.multiply(&w), w.multiply(g)] {
                if keys.insert(next.encode()) {
                    out.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    out.sort();
    out
}

/// The Dynkin vertices spanning the facet whose pointwise fixer is `W_I`:
/// the chain endpoints map to themselves, the midpoints `a_1`/`a_{n−1}` to
/// their edge's endpoints, interior chain indices to themselves.
pub fn facet_vertex_set(indices: &BTreeSet<usize>, n: usize) -> Result<BTreeSet<VertexLabel>> {
    validate_rank(n)?;
    if indices.is_empty() {
        return Err(Error::InvalidIndex("facet vertex set needs a nonempty index set".into()));
    }
    let mut out = BTreeSet::new();
    for &i in indices {
        if i > n {
            return Err(Error::InvalidIndex(format!("chain index {i} out of range 0..={n}")));
        }
        if i == 0 {
            out.insert(VertexLabel::Chain(0));
        } else if i == n {
            out.insert(VertexLabel::Chain(n));
        } else if i == 1 {
            out.insert(VertexLabel::Chain(0));
            out.insert(VertexLabel::Prime(0));
        } else if i == n - 1 {
            out.insert(VertexLabel::Chain(n));
            out.insert(VertexLabel::Prime(n));
        } else {
            out.insert(VertexLabel::Chain(i));
        }
    }
    Ok(out)
}
