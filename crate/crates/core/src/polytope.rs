//! The parallelotope data model and the Venkov necessary-condition checker.
//!
//! A parallelotope candidate is presented by facet/lattice vector pairs
//! `(q_i, t_i)`: the body is `{x : |q_i^T x| <= alpha_i}` with
//! `alpha_i = q_i^T t_i / 2`, and `t_i` is the translation carrying the body
//! onto the neighbour sharing facet `F_i`. Vertex and ridge enumeration work
//! at desk scale (n <= 5, m <= 40) by exhaustive subset solving.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use itertools::Itertools;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::linalg::{
    dot, dot_int, int_to_rat_vec, int_vec_is_zero, int_vec_neg, int_vec_sub, nullspace, rat,
    solve_unique, vec_is_zero, vec_neg, vec_sub, Int, IntVector, Rat, RatMatrix, RatVector,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("pair {0}: facet vector is zero")]
    ZeroFacetVector(usize),
    #[error("pair {0}: lattice vector is zero")]
    ZeroLatticeVector(usize),
    #[error("pair {0}: q^T t must be positive")]
    NonPositivePairing(usize),
    #[error("pairs {0} and {1} share a lattice vector up to sign")]
    DuplicateLatticeVector(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("halfspace system is unbounded")]
    UnboundedInput,
    #[error("belt has {facets} facets; a parallelotope belt has 4 or 6")]
    BeltSizeViolation { facets: usize },
    #[error("3-belt lattice vectors admit no relation with coefficients ±1")]
    NoIntegerRelation,
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
}

/// Orientation of a facet within its opposite-facet pair.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn apply(self, r: &Rat) -> Rat {
        match self {
            Sign::Plus => r.clone(),
            Sign::Minus => -r.clone(),
        }
    }

    pub fn apply_vec(self, v: &[Rat]) -> RatVector {
        match self {
            Sign::Plus => v.to_vec(),
            Sign::Minus => vec_neg(v),
        }
    }

    pub fn apply_int_vec(self, v: &[Int]) -> IntVector {
        match self {
            Sign::Plus => v.to_vec(),
            Sign::Minus => int_vec_neg(v),
        }
    }
}

/// One opposite-facet pair: facet vector `q` with its associated lattice
/// vector `t`. The facet inequality is `q^T x <= q^T t / 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetPair {
    pub q: RatVector,
    pub t: IntVector,
}

impl FacetPair {
    pub fn new(q: RatVector, t: IntVector) -> Self {
        FacetPair { q, t }
    }
}

/// A parallelotope candidate: dimension plus the indexed family of
/// opposite-facet pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parallelotope {
    dim: usize,
    pairs: Vec<FacetPair>,
}

impl Parallelotope {
    /// Validates and wraps the pair family. Rejected at construction time:
    /// zero vectors, `q^T t <= 0` (the facet inequality would not bound a
    /// body with the origin inside), and duplicate lattice vectors up to
    /// sign.
    pub fn new(dim: usize, pairs: Vec<FacetPair>) -> Result<Self, PolytopeError> {
        if dim == 0 {
            return Err(PolytopeError::DimensionMismatch("dimension 0".into()));
        }
        if pairs.is_empty() {
            return Err(PolytopeError::DimensionMismatch("no facet pairs".into()));
        }
        for (i, pair) in pairs.iter().enumerate() {
            if pair.q.len() != dim || pair.t.len() != dim {
                return Err(PolytopeError::DimensionMismatch(format!(
                    "pair {i} has vectors of length {}/{}, expected {dim}",
                    pair.q.len(),
                    pair.t.len()
                )));
            }
            if vec_is_zero(&pair.q) {
                return Err(PolytopeError::ZeroFacetVector(i));
            }
            if int_vec_is_zero(&pair.t) {
                return Err(PolytopeError::ZeroLatticeVector(i));
            }
            if !dot_int(&pair.q, &pair.t).is_positive() {
                return Err(PolytopeError::NonPositivePairing(i));
            }
        }
        for (i, a) in pairs.iter().enumerate() {
            for (j, b) in pairs.iter().enumerate().skip(i + 1) {
                if a.t == b.t || a.t == int_vec_neg(&b.t) {
                    return Err(PolytopeError::DuplicateLatticeVector(i, j));
                }
            }
        }
        Ok(Parallelotope { dim, pairs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[FacetPair] {
        &self.pairs
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Facet offset `alpha_i = q_i^T t_i / 2`.
    pub fn alpha(&self, i: usize) -> Rat {
        dot_int(&self.pairs[i].q, &self.pairs[i].t) / rat(2)
    }

    /// Rebuilds with facet vector `i` replaced by `beta * q_i`.
    pub fn with_scaled_facet(&self, i: usize, beta: &Rat) -> Result<Self, PolytopeError> {
        let mut pairs = self.pairs.clone();
        pairs[i].q = pairs[i].q.iter().map(|x| beta * x).collect();
        Parallelotope::new(self.dim, pairs)
    }

    /// Membership in the translated tile `P(t)` per the shifted halfspace
    /// description: `|q_i^T (x - t)| <= alpha_i` for all `i`.
    pub fn tile_contains(&self, t: &[Int], x: &[Rat]) -> bool {
        let shifted = vec_sub(x, &int_to_rat_vec(t));
        self.contains(&shifted)
    }

    /// Membership in `P(0)` (boundary included).
    pub fn contains(&self, x: &[Rat]) -> bool {
        self.pairs
            .iter()
            .enumerate()
            .all(|(i, pair)| dot(&pair.q, x).abs() <= self.alpha(i))
    }

    /// Strict interior membership in `P(0)`.
    pub fn strictly_contains(&self, x: &[Rat]) -> bool {
        self.pairs
            .iter()
            .enumerate()
            .all(|(i, pair)| dot(&pair.q, x).abs() < self.alpha(i))
    }
}

/// One halfspace `normal^T x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: RatVector,
    pub offset: Rat,
}

/// H-representation of `P(0)`: the `2m` halfspaces
/// `±q_i^T x <= q_i^T t_i / 2`, ordered `(+0, -0, +1, -1, ...)`.
pub fn hrep(p: &Parallelotope) -> Vec<Halfspace> {
    hrep_translated(p, &vec![Int::zero(); p.dim()])
}

/// H-representation of the translated tile `P(t)`; offsets shift by
/// `±q_i^T t` relative to [`hrep`].
pub fn hrep_translated(p: &Parallelotope, t: &[Int]) -> Vec<Halfspace> {
    let mut out = Vec::with_capacity(2 * p.pair_count());
    for (i, pair) in p.pairs().iter().enumerate() {
        let alpha = p.alpha(i);
        let shift = dot_int(&pair.q, t);
        out.push(Halfspace {
            normal: pair.q.clone(),
            offset: &alpha + &shift,
        });
        out.push(Halfspace {
            normal: vec_neg(&pair.q),
            offset: &alpha - &shift,
        });
    }
    out
}

fn signed_facet_of_halfspace(h: usize) -> (usize, Sign) {
    (h / 2, if h % 2 == 0 { Sign::Plus } else { Sign::Minus })
}

/// A facet selected with its orientation: `(i, Plus)` is the facet on
/// `q_i^T x = alpha_i`, `(i, Minus)` the opposite one.
pub type SignedFacet = (usize, Sign);

/// All vertices of `P(0)` with their active facet sets.
#[derive(Debug, Clone)]
pub struct VertexSet {
    /// Vertices sorted lexicographically.
    pub vertices: Vec<RatVector>,
    /// Active signed facets per vertex, parallel to `vertices`.
    pub active: Vec<Vec<SignedFacet>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Ids of vertices lying on the given signed facet.
    pub fn on_facet(&self, facet: SignedFacet) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| self.active[v].contains(&facet))
            .collect()
    }
}

/// Vertices of an arbitrary halfspace system by exhaustive subset solving:
/// every `dim`-subset of boundary hyperplanes is solved exactly and the
/// unique solutions are kept when feasible. Active sets are recomputed
/// against the full system, so degenerate vertices carry every tight
/// constraint. The caller is responsible for boundedness.
pub fn vertices_of_halfspaces(
    halfspaces: &[Halfspace],
    dim: usize,
) -> Result<Vec<(RatVector, Vec<usize>)>, PolytopeError> {
    if halfspaces.len() < dim {
        return Err(PolytopeError::UnboundedInput);
    }
    let mut seen: HashSet<RatVector> = HashSet::new();
    let mut out: Vec<(RatVector, Vec<usize>)> = Vec::new();
    for subset in (0..halfspaces.len()).combinations(dim) {
        let m = RatMatrix::from_rows(subset.iter().map(|&h| halfspaces[h].normal.clone()).collect());
        let b: RatVector = subset.iter().map(|&h| halfspaces[h].offset.clone()).collect();
        let Some(x) = solve_unique(&m, &b) else {
            continue;
        };
        if seen.contains(&x) {
            continue;
        }
        let mut feasible = true;
        let mut active = Vec::new();
        for (h, hs) in halfspaces.iter().enumerate() {
            let lhs = dot(&hs.normal, &x);
            if lhs > hs.offset {
                feasible = false;
                break;
            }
            if lhs == hs.offset {
                active.push(h);
            }
        }
        if !feasible {
            continue;
        }
        seen.insert(x.clone());
        out.push((x, active));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// All vertices of `P(0)` with signed active facet sets.
///
/// Desk-scale preconditions are enforced (n <= 5, m <= 40). Boundedness is
/// exact here: the constraints come in opposite pairs, so the recession cone
/// is the common kernel of the facet vectors.
pub fn enumerate_vertices(p: &Parallelotope) -> Result<VertexSet, PolytopeError> {
    if p.dim() > 5 || p.pair_count() > 40 {
        return Err(PolytopeError::TooLarge(format!(
            "n = {}, m = {}",
            p.dim(),
            p.pair_count()
        )));
    }
    let q_rows = RatMatrix::from_rows(p.pairs().iter().map(|pair| pair.q.clone()).collect());
    if !nullspace(&q_rows).is_empty() {
        return Err(PolytopeError::UnboundedInput);
    }
    let raw = vertices_of_halfspaces(&hrep(p), p.dim())?;
    let mut vertices = Vec::with_capacity(raw.len());
    let mut active = Vec::with_capacity(raw.len());
    for (x, hs_ids) in raw {
        vertices.push(x);
        active.push(hs_ids.into_iter().map(signed_facet_of_halfspace).collect());
    }
    Ok(VertexSet { vertices, active })
}

/// True iff the vertex set is invariant under `x -> -x`.
pub fn is_centrally_symmetric(vertices: &[RatVector]) -> bool {
    let set: HashSet<&RatVector> = vertices.iter().collect();
    vertices.iter().all(|v| set.contains(&vec_neg(v)))
}

/// Central symmetry of `P(0)` itself, from its enumerated vertices.
pub fn check_central_symmetry(vs: &VertexSet) -> bool {
    is_centrally_symmetric(&vs.vertices)
}

/// Per-pair facet symmetry: the vertex set of facet `F_i` must be invariant
/// under `v -> t_i - v`, the reflection through the facet center `t_i / 2`.
/// A pair whose facet carries no vertex fails its entry.
pub fn check_facet_symmetry(p: &Parallelotope, vs: &VertexSet) -> Vec<bool> {
    (0..p.pair_count())
        .map(|i| {
            let ids = vs.on_facet((i, Sign::Plus));
            if ids.is_empty() {
                return false;
            }
            let facet_vertices: HashSet<&RatVector> = ids.iter().map(|&v| &vs.vertices[v]).collect();
            let t_rat = int_to_rat_vec(&p.pairs()[i].t);
            ids.iter().all(|&v| {
                let reflected = vec_sub(&t_rat, &vs.vertices[v]);
                facet_vertices.contains(&reflected)
            })
        })
        .collect()
}

/// An `(n-2)`-face as the intersection of two signed facets.
#[derive(Debug, Clone)]
pub struct Ridge {
    pub facets: [SignedFacet; 2],
    /// Basis of the ridge's `(n-2)`-dimensional linear span; empty in
    /// dimension 2 where ridges are points.
    pub span: Vec<RatVector>,
    /// Ids into the [`VertexSet`] this ridge was extracted from.
    pub vertex_ids: Vec<usize>,
}

/// All `(n-2)`-faces, found as facet pairs whose shared vertex set has
/// affine dimension exactly `n - 2`.
pub fn ridges(p: &Parallelotope, vs: &VertexSet) -> Vec<Ridge> {
    let n = p.dim();
    if n < 2 {
        return Vec::new();
    }
    let mut facets: Vec<SignedFacet> = Vec::new();
    for i in 0..p.pair_count() {
        facets.push((i, Sign::Plus));
        facets.push((i, Sign::Minus));
    }
    let mut out = Vec::new();
    for pair in facets.iter().combinations(2) {
        let (a, b) = (*pair[0], *pair[1]);
        if a.0 == b.0 {
            continue;
        }
        let ids: Vec<usize> = vs
            .on_facet(a)
            .into_iter()
            .filter(|v| vs.active[*v].contains(&b))
            .collect();
        if ids.is_empty() {
            continue;
        }
        let base = &vs.vertices[ids[0]];
        let diffs: Vec<RatVector> = ids[1..]
            .iter()
            .map(|&v| vec_sub(&vs.vertices[v], base))
            .collect();
        let span = independent_rows(diffs);
        if span.len() != n - 2 {
            continue;
        }
        out.push(Ridge {
            facets: [a, b],
            span,
            vertex_ids: ids,
        });
    }
    out
}

/// Deterministic basis of the row span (nonzero rows of the reduced form).
fn independent_rows(rows: Vec<RatVector>) -> Vec<RatVector> {
    if rows.is_empty() {
        return Vec::new();
    }
    let (reduced, pivots) = crate::linalg::rref(&RatMatrix::from_rows(rows));
    (0..pivots.len()).map(|r| reduced.row(r).to_vec()).collect()
}

#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub enum BeltKind {
    Two,
    Three,
}

/// A belt: the facet pairs orthogonal to one ridge direction class.
/// For a 3-belt with sorted indices `{i, j, k}`, `eps = (eps_j, eps_k)` are
/// the unique signs with `t_i - eps_j t_j - eps_k t_k = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Belt {
    pub kind: BeltKind,
    pub indices: Vec<usize>,
    pub eps: Option<(Sign, Sign)>,
}

impl Belt {
    pub fn facet_count(&self) -> usize {
        2 * self.indices.len()
    }
}

/// Pair indices whose facet vectors are orthogonal to the ridge span.
/// In dimension 2 the span is trivial and every pair belongs to the single
/// belt.
pub fn belt_members(p: &Parallelotope, ridge: &Ridge) -> Vec<usize> {
    (0..p.pair_count())
        .filter(|&j| {
            ridge
                .span
                .iter()
                .all(|s| dot(&p.pairs()[j].q, s).is_zero())
        })
        .collect()
}

/// The belt of a ridge, classified as 2-belt (4 facets) or 3-belt
/// (6 facets). For 3-belts the ±1 coefficients of the lattice relation are
/// solved from two independent coordinates and then the full relation is
/// verified exactly.
pub fn belt_of(p: &Parallelotope, ridge: &Ridge) -> Result<Belt, PolytopeError> {
    let members = belt_members(p, ridge);
    belt_from_members(p, members)
}

fn belt_from_members(p: &Parallelotope, members: Vec<usize>) -> Result<Belt, PolytopeError> {
    match members.len() {
        2 => Ok(Belt {
            kind: BeltKind::Two,
            indices: members,
            eps: None,
        }),
        3 => {
            let eps = epsilon_signs(
                &p.pairs()[members[0]].t,
                &p.pairs()[members[1]].t,
                &p.pairs()[members[2]].t,
            )?;
            Ok(Belt {
                kind: BeltKind::Three,
                indices: members,
                eps: Some(eps),
            })
        }
        k => Err(PolytopeError::BeltSizeViolation { facets: 2 * k }),
    }
}

/// Signs `(eps_j, eps_k)` with `t_i = eps_j t_j + eps_k t_k`.
fn epsilon_signs(ti: &[Int], tj: &[Int], tk: &[Int]) -> Result<(Sign, Sign), PolytopeError> {
    let n = ti.len();
    // Two coordinates where (t_j, t_k) are independent.
    let mut coords = None;
    'outer: for r1 in 0..n {
        for r2 in (r1 + 1)..n {
            let det = &tj[r1] * &tk[r2] - &tj[r2] * &tk[r1];
            if !det.is_zero() {
                coords = Some((r1, r2));
                break 'outer;
            }
        }
    }
    let candidates: Vec<(Sign, Sign)> = match coords {
        Some((r1, r2)) => {
            let m = RatMatrix::from_rows(vec![
                vec![
                    Rat::from_integer(tj[r1].clone()),
                    Rat::from_integer(tk[r1].clone()),
                ],
                vec![
                    Rat::from_integer(tj[r2].clone()),
                    Rat::from_integer(tk[r2].clone()),
                ],
            ]);
            let b = vec![
                Rat::from_integer(ti[r1].clone()),
                Rat::from_integer(ti[r2].clone()),
            ];
            let sol = solve_unique(&m, &b).ok_or(PolytopeError::NoIntegerRelation)?;
            let to_sign = |r: &Rat| -> Option<Sign> {
                if *r == rat(1) {
                    Some(Sign::Plus)
                } else if *r == rat(-1) {
                    Some(Sign::Minus)
                } else {
                    None
                }
            };
            match (to_sign(&sol[0]), to_sign(&sol[1])) {
                (Some(a), Some(b)) => vec![(a, b)],
                _ => return Err(PolytopeError::NoIntegerRelation),
            }
        }
        // Degenerate pair of lattice vectors: fall back to trying all signs.
        None => vec![
            (Sign::Plus, Sign::Plus),
            (Sign::Plus, Sign::Minus),
            (Sign::Minus, Sign::Plus),
            (Sign::Minus, Sign::Minus),
        ],
    };
    for (ej, ek) in candidates {
        let rhs = crate::linalg::int_vec_add(&ej.apply_int_vec(tj), &ek.apply_int_vec(tk));
        if int_vec_is_zero(&int_vec_sub(ti, &rhs)) {
            return Ok((ej, ek));
        }
    }
    Err(PolytopeError::NoIntegerRelation)
}

/// Belts deduplicated by index set, in sorted order.
pub fn distinct_belts(p: &Parallelotope, ridge_list: &[Ridge]) -> Result<Vec<Belt>, PolytopeError> {
    let mut classes: BTreeMap<Vec<usize>, Belt> = BTreeMap::new();
    for ridge in ridge_list {
        let members = belt_members(p, ridge);
        if !classes.contains_key(&members) {
            classes.insert(members.clone(), belt_from_members(p, members)?);
        }
    }
    Ok(classes.into_values().collect())
}

/// Outcome of the three Venkov necessary conditions.
#[derive(Debug, Clone)]
pub struct VenkovReport {
    pub central_symmetry: bool,
    pub facet_symmetry: Vec<bool>,
    /// Facet count per distinct ridge class (belt); 4 and 6 are admissible.
    pub belt_sizes: Vec<usize>,
    pub belts_ok: bool,
    pub pass: bool,
}

/// Runs the three Venkov checks. Belt-size violations and unresolvable
/// sign relations are recorded as failed entries rather than aborting.
pub fn venkov_check(p: &Parallelotope) -> Result<VenkovReport, PolytopeError> {
    let vs = enumerate_vertices(p)?;
    venkov_check_with(p, &vs)
}

/// [`venkov_check`] on an already enumerated vertex set.
pub fn venkov_check_with(p: &Parallelotope, vs: &VertexSet) -> Result<VenkovReport, PolytopeError> {
    let central = check_central_symmetry(vs);
    let facet_symmetry = check_facet_symmetry(p, vs);
    let ridge_list = ridges(p, vs);
    let mut sizes: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut belts_ok = true;
    for ridge in &ridge_list {
        let members = belt_members(p, ridge);
        let facets = 2 * members.len();
        if sizes.insert(members.clone(), facets).is_some() {
            continue;
        }
        if !(facets == 4 || facets == 6) {
            belts_ok = false;
        } else if members.len() == 3 {
            let ts = &p.pairs();
            if epsilon_signs(&ts[members[0]].t, &ts[members[1]].t, &ts[members[2]].t).is_err() {
                belts_ok = false;
            }
        }
    }
    // A body with no ridge at all only happens in dimension 1.
    if p.dim() >= 2 && ridge_list.is_empty() {
        belts_ok = false;
    }
    let pass = central && facet_symmetry.iter().all(|&b| b) && belts_ok;
    Ok(VenkovReport {
        central_symmetry: central,
        facet_symmetry,
        belt_sizes: sizes.into_values().collect(),
        belts_ok,
        pass,
    })
}
