//! Isomorphism search between abstract cone complexes over a common base.
//!
//! Backtracking over poset matchings ordered by dimension, with early pruning
//! on cone fingerprints and per-cone integer linear solves for the linear
//! maps. The search space is finite, so a completed search without a match is
//! a sound negative; running out of node budget is reported separately and is
//! never silently treated as a negative.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, One, Signed};

use crate::complex::{is_smooth, Cone, ConeComplex, ConeId};
use crate::error::{Error, Result};
use crate::lattice::{self, solve_integer_matrix, IntMatrix, IntVec};

/// Per-cone projection to a cone of the base complex.
#[derive(Debug, Clone)]
pub struct BaseProjection {
    pub base_cone: ConeId,
    /// N_cone -> N_base_cone.
    pub matrix: IntMatrix,
}

pub type Projections = BTreeMap<ConeId, BaseProjection>;

/// An isomorphism of cone complexes: a poset bijection together with a
/// unimodular linear map per cone carrying cones onto cones.
#[derive(Debug, Clone)]
pub struct ComplexIso {
    pub cone_bijection: BTreeMap<ConeId, ConeId>,
    pub linear_maps: BTreeMap<ConeId, IntMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    ConeCountMismatch { left: usize, right: usize },
    FingerprintMismatch { detail: String },
    SearchExhausted { nodes: u64 },
}

impl std::fmt::Display for Obstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Obstruction::ConeCountMismatch { left, right } => {
                write!(f, "cone count mismatch: {left} vs {right}")
            }
            Obstruction::FingerprintMismatch { detail } => {
                write!(f, "fingerprint mismatch: {detail}")
            }
            Obstruction::SearchExhausted { nodes } => {
                write!(f, "exhausted search ({nodes} nodes)")
            }
        }
    }
}

#[derive(Debug)]
pub enum IsoOutcome {
    Found(ComplexIso),
    Absent(Obstruction),
    BudgetExhausted { nodes: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Fingerprint {
    dim: usize,
    n_rays: usize,
    smooth: bool,
    multiplicity: BigInt,
    base: ConeId,
}

fn fingerprint(cone: &Cone, proj: &BaseProjection) -> Fingerprint {
    Fingerprint {
        dim: cone.dim(),
        n_rays: cone.n_rays(),
        smooth: is_smooth(cone),
        multiplicity: cone.multiplicity(),
        base: proj.base_cone,
    }
}

/// Check that projections are defined on every cone and commute with the face
/// maps of the complex and of the base.
pub fn check_projection_compatibility(
    complex: &ConeComplex,
    base: &ConeComplex,
    proj: &Projections,
) -> Result<()> {
    for id in complex.ids() {
        let p = proj
            .get(&id)
            .ok_or_else(|| Error::Structural(format!("projection missing for cone {id}")))?;
        let c = complex.cone(id)?;
        let b = base.cone(p.base_cone)?;
        if p.matrix.rows() != b.dim() || p.matrix.cols() != c.dim() {
            return Err(Error::Structural(format!(
                "projection matrix for {id} has shape {}x{}, expected {}x{}",
                p.matrix.rows(),
                p.matrix.cols(),
                b.dim(),
                c.dim()
            )));
        }
    }
    for &(f, c) in complex.face_pairs() {
        let pf = &proj[&f];
        let pc = &proj[&c];
        if !base.is_face_pair(pf.base_cone, pc.base_cone) {
            return Err(Error::Structural(format!(
                "projection does not respect faces: base of {f} is not a face of base of {c}"
            )));
        }
        let incl = complex.face_map(f, c)?;
        let base_incl = base.face_map(pf.base_cone, pc.base_cone)?;
        if pc.matrix.mul(&incl) != base_incl.mul(&pf.matrix) {
            return Err(Error::Structural(format!(
                "projection does not commute with the face map {f} -> {c}"
            )));
        }
    }
    Ok(())
}

fn sorted_rays(v: &[IntVec]) -> Vec<IntVec> {
    let mut out = v.to_vec();
    out.sort();
    out
}

/// Full re-verification of a claimed isomorphism: poset bijection, unimodular
/// maps, cones onto cones, commutation with all face maps, and compatibility
/// with the projections to the base.
pub fn verify_iso(
    a: &ConeComplex,
    b: &ConeComplex,
    proj_a: &Projections,
    proj_b: &Projections,
    iso: &ComplexIso,
) -> Result<()> {
    if iso.cone_bijection.len() != a.len() || a.len() != b.len() {
        return Err(Error::Structural("iso bijection has wrong size".into()));
    }
    let mut image: BTreeSet<ConeId> = BTreeSet::new();
    for id in a.ids() {
        let &tgt = iso
            .cone_bijection
            .get(&id)
            .ok_or_else(|| Error::Structural(format!("iso misses cone {id}")))?;
        if !image.insert(tgt) {
            return Err(Error::Structural("iso cone map is not injective".into()));
        }
        let ca = a.cone(id)?;
        let cb = b.cone(tgt)?;
        let m = iso
            .linear_maps
            .get(&id)
            .ok_or_else(|| Error::Structural(format!("iso misses linear map for {id}")))?;
        if m.rows() != cb.dim() || m.cols() != ca.dim() {
            return Err(Error::Structural(format!(
                "iso map for {id} has wrong shape"
            )));
        }
        if ca.dim() > 0 && !lattice::is_unimodular(m) {
            return Err(Error::Structural(format!(
                "iso map for {id} is not unimodular"
            )));
        }
        let mapped: Vec<IntVec> = ca.rays().iter().map(|r| m.mul_vec(r)).collect();
        if sorted_rays(&mapped) != cb.rays() {
            return Err(Error::Structural(format!(
                "iso map for {id} does not carry the ray set onto the target ray set"
            )));
        }
        let pa = &proj_a[&id];
        let pb = &proj_b[&tgt];
        if pa.base_cone != pb.base_cone {
            return Err(Error::Structural(format!(
                "iso does not lie over the base at cone {id}"
            )));
        }
        if pb.matrix.mul(m) != pa.matrix {
            return Err(Error::Structural(format!(
                "iso does not commute with the projections at cone {id}"
            )));
        }
    }
    // poset isomorphism in both directions, and face-map commutation
    for x in a.ids() {
        for y in a.ids() {
            let fx = iso.cone_bijection[&x];
            let fy = iso.cone_bijection[&y];
            let left = a.face_pairs().contains(&(x, y));
            let right = b.face_pairs().contains(&(fx, fy));
            if left != right {
                return Err(Error::Structural(format!(
                    "iso is not a poset isomorphism at ({x}, {y})"
                )));
            }
            if left {
                let incl_a = a.face_map(x, y)?;
                let incl_b = b.face_map(fx, fy)?;
                if iso.linear_maps[&y].mul(&incl_a) != incl_b.mul(&iso.linear_maps[&x]) {
                    return Err(Error::Structural(format!(
                        "iso does not commute with the face map {x} -> {y}"
                    )));
                }
            }
        }
    }
    Ok(())
}

struct Search<'a> {
    a: &'a ConeComplex,
    b: &'a ConeComplex,
    proj_a: &'a Projections,
    proj_b: &'a Projections,
    fp_a: Vec<Fingerprint>,
    fp_b: Vec<Fingerprint>,
    order: Vec<ConeId>,
    nodes: u64,
    budget: u64,
}

enum SearchResult {
    Found,
    NotFound,
    Budget,
}

impl<'a> Search<'a> {
    /// Solve for the linear map of `a_id -> b_id` from the already-assigned
    /// member faces. Returns None when no integral map exists.
    fn solve_map(
        &self,
        a_id: ConeId,
        b_id: ConeId,
        assignment: &BTreeMap<ConeId, ConeId>,
        maps: &BTreeMap<ConeId, IntMatrix>,
    ) -> Result<Option<IntMatrix>> {
        let ca = self.a.cone(a_id).expect("cone exists");
        let cb = self.b.cone(b_id).expect("cone exists");
        let d = ca.dim();
        if d == 0 {
            return Ok(Some(IntMatrix::zeros(0, 0)));
        }
        if d == 1 {
            // primitive generators in rank one are units
            let ga = &ca.rays()[0][0];
            let gb = &cb.rays()[0][0];
            if !ga.abs().is_one() || !gb.abs().is_one() {
                return Err(Error::Structural(
                    "abstract ray cone has a non-unit generator".into(),
                ));
            }
            let m = IntMatrix::from_rows(vec![vec![ga * gb]]);
            return Ok(Some(m));
        }
        // Constraints M * incl_a = incl_b * M_face over all member faces.
        // The rays of the cone are member faces of face-closed complexes and
        // span, so the system determines M uniquely when consistent.
        let mut lhs_cols: Vec<IntVec> = Vec::new();
        let mut rhs_cols: Vec<IntVec> = Vec::new();
        for f in self.a.member_faces(a_id) {
            let incl_a = self.a.face_map(f, a_id)?;
            let fb = assignment[&f];
            let incl_b = self.b.face_map(fb, b_id)?;
            let rhs = incl_b.mul(&maps[&f]);
            for j in 0..incl_a.cols() {
                lhs_cols.push(incl_a.column(j));
                rhs_cols.push(rhs.column(j));
            }
        }
        let p = IntMatrix::from_columns(d, &lhs_cols);
        if lattice::rank(&p) < d {
            return Err(Error::Structural(
                "complex is not face-closed: member faces do not span".into(),
            ));
        }
        let q = IntMatrix::from_columns(d, &rhs_cols);
        // M * P = Q  <=>  P^T * M^T = Q^T
        match solve_integer_matrix(&p.transpose(), &q.transpose()) {
            Some(mt) => Ok(Some(mt.transpose())),
            None => Ok(None),
        }
    }

    fn candidate_ok(
        &self,
        a_id: ConeId,
        b_id: ConeId,
        assignment: &BTreeMap<ConeId, ConeId>,
    ) -> bool {
        if self.fp_a[a_id.0] != self.fp_b[b_id.0] {
            return false;
        }
        let faces_a: BTreeSet<ConeId> = self
            .a
            .member_faces(a_id)
            .into_iter()
            .map(|f| assignment[&f])
            .collect();
        let faces_b: BTreeSet<ConeId> = self.b.member_faces(b_id).into_iter().collect();
        faces_a == faces_b
    }

    fn verify_local(&self, a_id: ConeId, b_id: ConeId, m: &IntMatrix) -> bool {
        let ca = self.a.cone(a_id).expect("cone exists");
        let cb = self.b.cone(b_id).expect("cone exists");
        if ca.dim() > 0 && !lattice::is_unimodular(m) {
            return false;
        }
        let mapped: Vec<IntVec> = ca.rays().iter().map(|r| m.mul_vec(r)).collect();
        if sorted_rays(&mapped) != cb.rays() {
            return false;
        }
        let pa = &self.proj_a[&a_id];
        let pb = &self.proj_b[&b_id];
        pa.base_cone == pb.base_cone && pb.matrix.mul(m) == pa.matrix
    }

    fn backtrack(
        &mut self,
        k: usize,
        assignment: &mut BTreeMap<ConeId, ConeId>,
        used: &mut BTreeSet<ConeId>,
        maps: &mut BTreeMap<ConeId, IntMatrix>,
    ) -> Result<SearchResult> {
        if k == self.order.len() {
            return Ok(SearchResult::Found);
        }
        let a_id = self.order[k];
        for b_id in self.b.ids() {
            if used.contains(&b_id) || !self.candidate_ok(a_id, b_id, assignment) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Ok(SearchResult::Budget);
            }
            let Some(m) = self.solve_map(a_id, b_id, assignment, maps)? else {
                continue;
            };
            if !self.verify_local(a_id, b_id, &m) {
                continue;
            }
            assignment.insert(a_id, b_id);
            used.insert(b_id);
            maps.insert(a_id, m);
            match self.backtrack(k + 1, assignment, used, maps)? {
                SearchResult::Found => return Ok(SearchResult::Found),
                SearchResult::Budget => return Ok(SearchResult::Budget),
                SearchResult::NotFound => {
                    assignment.remove(&a_id);
                    used.remove(&b_id);
                    maps.remove(&a_id);
                }
            }
        }
        Ok(SearchResult::NotFound)
    }
}

/// Search for an isomorphism A -> B whose linear maps satisfy
/// proj_B ∘ iso = proj_A on every cone. Absence is a value; any returned
/// isomorphism has passed full re-verification.
pub fn find_isomorphism_over_base(
    a: &ConeComplex,
    b: &ConeComplex,
    base: &ConeComplex,
    proj_a: &Projections,
    proj_b: &Projections,
    budget: u64,
) -> Result<IsoOutcome> {
    check_projection_compatibility(a, base, proj_a)?;
    check_projection_compatibility(b, base, proj_b)?;

    if a.len() != b.len() {
        return Ok(IsoOutcome::Absent(Obstruction::ConeCountMismatch {
            left: a.len(),
            right: b.len(),
        }));
    }
    let fp_a: Vec<Fingerprint> = a
        .ids()
        .map(|id| fingerprint(a.cone(id).expect("cone"), &proj_a[&id]))
        .collect();
    let fp_b: Vec<Fingerprint> = b
        .ids()
        .map(|id| fingerprint(b.cone(id).expect("cone"), &proj_b[&id]))
        .collect();
    let mut sa = fp_a.clone();
    let mut sb = fp_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        let detail = sa
            .iter()
            .zip(&sb)
            .find(|(x, y)| x != y)
            .map(|(x, y)| {
                format!(
                    "left has (dim {}, {} rays, smooth {}, mult {}, over base {}), right has (dim {}, {} rays, smooth {}, mult {}, over base {})",
                    x.dim, x.n_rays, x.smooth, x.multiplicity, x.base,
                    y.dim, y.n_rays, y.smooth, y.multiplicity, y.base
                )
            })
            .unwrap_or_default();
        return Ok(IsoOutcome::Absent(Obstruction::FingerprintMismatch {
            detail,
        }));
    }

    let mut order: Vec<ConeId> = a.ids().collect();
    order.sort_by_key(|&id| {
        let c = a.cone(id).expect("cone");
        (c.dim(), c.n_rays(), id)
    });

    let mut search = Search {
        a,
        b,
        proj_a,
        proj_b,
        fp_a,
        fp_b,
        order,
        nodes: 0,
        budget,
    };
    let mut assignment = BTreeMap::new();
    let mut used = BTreeSet::new();
    let mut maps = BTreeMap::new();
    match search.backtrack(0, &mut assignment, &mut used, &mut maps)? {
        SearchResult::Found => {
            let iso = ComplexIso {
                cone_bijection: assignment,
                linear_maps: maps,
            };
            verify_iso(a, b, proj_a, proj_b, &iso)?;
            Ok(IsoOutcome::Found(iso))
        }
        SearchResult::NotFound => Ok(IsoOutcome::Absent(Obstruction::SearchExhausted {
            nodes: search.nodes,
        })),
        SearchResult::Budget => Ok(IsoOutcome::BudgetExhausted {
            nodes: search.nodes,
        }),
    }
}

/// A single-point complex, for searches over a trivial base.
pub fn point_complex() -> ConeComplex {
    ConeComplex::new_abstract(vec![Cone::zero(0)], BTreeMap::new())
        .expect("the point complex is valid")
}

/// Projections of every cone of a complex to the point complex.
pub fn projections_to_point(complex: &ConeComplex) -> Projections {
    complex
        .ids()
        .map(|id| {
            let d = complex.cone(id).expect("cone").dim();
            (
                id,
                BaseProjection {
                    base_cone: ConeId(0),
                    matrix: IntMatrix::zeros(0, d),
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{as_abstract, quotient_complex};
    use crate::lattice::vec_i64;

    fn v(x: &[i64]) -> IntVec {
        vec_i64(x)
    }

    const BUDGET: u64 = 1_000_000;

    #[test]
    fn identity_iso() {
        let fan = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let a = as_abstract(&fan).unwrap();
        let base = point_complex();
        let pa = projections_to_point(&a);
        let out = find_isomorphism_over_base(&a, &a, &base, &pa, &pa, BUDGET).unwrap();
        match out {
            IsoOutcome::Found(iso) => {
                verify_iso(&a, &a, &pa, &pa, &iso).unwrap();
            }
            other => panic!("expected iso, got {other:?}"),
        }
    }

    #[test]
    fn count_obstruction() {
        let fan1 = ConeComplex::build_fan(1, &[vec![v(&[1])]]).unwrap();
        let fan2 = ConeComplex::build_fan(1, &[vec![v(&[1])], vec![v(&[-1])]]).unwrap();
        let a = as_abstract(&fan1).unwrap();
        let b = as_abstract(&fan2).unwrap();
        let base = point_complex();
        let out = find_isomorphism_over_base(
            &a,
            &b,
            &base,
            &projections_to_point(&a),
            &projections_to_point(&b),
            BUDGET,
        )
        .unwrap();
        assert!(matches!(
            out,
            IsoOutcome::Absent(Obstruction::ConeCountMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn quotient_by_zero_recovers_complex() {
        let fan = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let zero = fan.zero_cone().unwrap();
        let q = quotient_complex(&fan, zero).unwrap();
        let a = as_abstract(&fan).unwrap();
        let base = point_complex();
        let out = find_isomorphism_over_base(
            &q.complex,
            &a,
            &base,
            &projections_to_point(&q.complex),
            &projections_to_point(&a),
            BUDGET,
        )
        .unwrap();
        assert!(matches!(out, IsoOutcome::Found(_)));
    }

    #[test]
    fn non_isomorphic_same_counts() {
        // quadrant fan vs the fan with rays (1,0),(1,2): same poset, the
        // second is not smooth, so the fingerprints differ
        let smooth = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let singular = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[1, 2])]]).unwrap();
        let a = as_abstract(&smooth).unwrap();
        let b = as_abstract(&singular).unwrap();
        let base = point_complex();
        let out = find_isomorphism_over_base(
            &a,
            &b,
            &base,
            &projections_to_point(&a),
            &projections_to_point(&b),
            BUDGET,
        )
        .unwrap();
        assert!(matches!(
            out,
            IsoOutcome::Absent(Obstruction::FingerprintMismatch { .. })
        ));
    }

    #[test]
    fn budget_exhaustion_reported() {
        let fan = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let a = as_abstract(&fan).unwrap();
        let base = point_complex();
        let pa = projections_to_point(&a);
        let out = find_isomorphism_over_base(&a, &a, &base, &pa, &pa, 1).unwrap();
        assert!(matches!(out, IsoOutcome::BudgetExhausted { .. }));
    }
}
