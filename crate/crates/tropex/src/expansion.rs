//! Open subdivisions, tropical expansion validation, vertices and tropical
//! position maps, polyhedral slices and combinatorial types.
//!
//! An expansion lives in the product coordinates N_Σ × N_τ: the first
//! `n_sigma` coordinates are the Σ-part (the projection `r`), the last
//! `n_tau` are the τ-part (the projection `p`).

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Zero};

use crate::complex::{product_fan, Cone, ConeComplex, ConeId};
use crate::error::{Error, Result};
use crate::lattice::{
    self, inverse_unimodular, is_saturated, rational_solve, saturated_span_basis,
    smith_normal_form, solve_integer_matrix, IntMatrix, IntVec, Lattice, RatVec,
};

fn cone_label(cone: &Cone) -> String {
    let body: Vec<String> = cone
        .rays()
        .iter()
        .map(|r| {
            let coords: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            format!("({})", coords.join(","))
        })
        .collect();
    format!("<{}>", body.join(", "))
}

/// A validated open subdivision Υ → Σ × τ.
#[derive(Debug, Clone)]
pub struct SubdivisionMap {
    pub n_sigma: usize,
    pub n_tau: usize,
    /// Per Υ-cone: the minimal Σ-cone containing the Σ-part.
    pub sigma_of: Vec<ConeId>,
    /// Per Υ-cone: the minimal face of τ containing the τ-part.
    pub kappa_of: Vec<ConeId>,
    /// Whether |Υ| = |Σ × τ|; open subdivisions need not be surjective.
    pub support_surjective: bool,
}

/// Data attached to a vertex: the cone ω_v mapped isomorphically onto τ,
/// the minimal stratum cone σ_v, and the tropical position map φ_v.
#[derive(Debug, Clone)]
pub struct VertexData {
    pub name: String,
    pub omega_v: ConeId,
    pub sigma_v: ConeId,
    /// N_τ = Z^{n_tau} -> N_{σ_v} (span-basis coordinates), dσv × n_tau.
    pub phi_v: IntMatrix,
}

/// The validated triple (Υ, r, p) with its cached vertex set.
#[derive(Debug, Clone)]
pub struct TropicalExpansion {
    pub sigma: ConeComplex,
    /// Face fan of the base cone τ, embedded in Z^{n_tau}.
    pub tau: ConeComplex,
    /// The top face of τ.
    pub tau_top: ConeId,
    pub upsilon: ConeComplex,
    pub n_sigma: usize,
    pub n_tau: usize,
    pub sub: SubdivisionMap,
    pub vertices: Vec<VertexData>,
}

impl TropicalExpansion {
    pub fn sigma_part(&self, v: &[BigInt]) -> IntVec {
        v[..self.n_sigma].to_vec()
    }

    pub fn tau_part(&self, v: &[BigInt]) -> IntVec {
        v[self.n_sigma..].to_vec()
    }

    /// Σ-part of a cone's span basis: the matrix of r restricted to N_ω.
    pub fn r_of_basis(&self, omega: ConeId) -> Result<IntMatrix> {
        let b = self.upsilon.cone(omega)?.span_basis();
        Ok(b.submatrix_rows(0..self.n_sigma))
    }

    /// τ-part of a cone's span basis: the matrix of p restricted to N_ω.
    pub fn p_of_basis(&self, omega: ConeId) -> Result<IntMatrix> {
        let b = self.upsilon.cone(omega)?.span_basis();
        Ok(b.submatrix_rows(self.n_sigma..self.n_sigma + self.n_tau))
    }

    pub fn vertex_by_name(&self, name: &str) -> Result<&VertexData> {
        self.vertices
            .iter()
            .find(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVertex {
                name: name.into(),
                available: self
                    .vertices
                    .iter()
                    .map(|v| v.name.clone())
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }

    /// The projection (N_{σ_v} × N_τ)/N_{ω_v} = N_{σ_v} given by the
    /// tropical position map, applied to an ambient integral vector whose
    /// Σ-part lies in the span of σ_v.
    pub fn vertex_projection(&self, v: &VertexData, x: &[BigInt]) -> Result<IntVec> {
        let sigma_cone = self.sigma.cone(v.sigma_v)?;
        let xs = self.sigma_part(x);
        let xt = self.tau_part(x);
        let a = sigma_cone.span_coords_int(&xs).ok_or_else(|| {
            Error::Structural("vertex projection applied outside span(σ_v) × N_τ".into())
        })?;
        Ok(lattice::vec_sub(&a, &v.phi_v.mul_vec(&xt)))
    }
}

/// Build the face fan of a single cone τ ⊆ Z^{n_tau}. The cone must span its
/// coordinate space, matching the convention that a cone's lattice is exactly
/// the lattice it spans.
pub fn base_cone_complex(n_tau: usize, rays: &[IntVec]) -> Result<(ConeComplex, ConeId)> {
    let fan = if rays.is_empty() {
        ConeComplex::build_fan(n_tau, &[])?
    } else {
        ConeComplex::build_fan(n_tau, &[rays.to_vec()])?
    };
    let tops = fan.maximal_cones();
    if tops.len() != 1 {
        return Err(Error::Input(
            "base cone description does not define a single cone".into(),
        ));
    }
    let top = tops[0];
    let dim = fan.cone(top)?.dim();
    if dim != n_tau {
        return Err(Error::Input(format!(
            "base cone has dimension {dim} but lives in rank {n_tau}; it must span its lattice"
        )));
    }
    Ok((fan, top))
}

/// Exact support-surjectivity test: inside each maximal cone c of the target,
/// the top-dimensional Υ-cones contained in c must tile c. In a fan, a facet
/// of a tile is either shared with exactly one other tile or lies in the
/// boundary of c.
fn support_surjective(upsilon: &ConeComplex, target: &ConeComplex) -> Result<bool> {
    for &c_id in &target.maximal_cones() {
        let c = target.cone(c_id)?;
        let d = c.dim();
        let tiles: Vec<ConeId> = upsilon
            .ids()
            .filter(|&id| {
                let w = upsilon.cone(id).expect("cone");
                w.dim() == d && c.contains_cone(w)
            })
            .collect();
        if tiles.is_empty() {
            return Ok(false);
        }
        let c_facets: Vec<Cone> = c.faces().into_iter().filter(|f| f.dim() + 1 == d).collect();
        for &t in &tiles {
            let w = upsilon.cone(t)?;
            for facet in w.faces().into_iter().filter(|f| f.dim() + 1 == d) {
                if c_facets.iter().any(|cf| cf.contains_cone(&facet)) {
                    continue;
                }
                let shared = tiles
                    .iter()
                    .filter(|&&o| o != t && upsilon.cone(o).expect("cone").contains_cone(&facet))
                    .count();
                if shared != 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Validate Υ → Σ × τ as an open subdivision: every Υ-cone is contained in a
/// target cone and every declared cone lattice is saturated. Injectivity on
/// supports is enforced by the embedded-fan flavour of Υ.
pub fn validate_open_subdivision(
    upsilon: &ConeComplex,
    sigma: &ConeComplex,
    tau: &ConeComplex,
    declared_lattices: &BTreeMap<ConeId, IntMatrix>,
) -> Result<SubdivisionMap> {
    let n_sigma = sigma.ambient_rank();
    let n_tau = tau.ambient_rank();
    if upsilon.ambient_rank() != n_sigma + n_tau {
        return Err(Error::DimensionMismatch {
            context: "Υ ambient rank vs N_Σ × N_τ".into(),
            expected: n_sigma + n_tau,
            got: upsilon.ambient_rank(),
        });
    }

    let mut sigma_of = Vec::with_capacity(upsilon.len());
    let mut kappa_of = Vec::with_capacity(upsilon.len());
    for id in upsilon.ids() {
        let w = upsilon.cone(id)?;
        let r_rays: Vec<IntVec> = w.rays().iter().map(|r| r[..n_sigma].to_vec()).collect();
        let p_rays: Vec<IntVec> = w.rays().iter().map(|r| r[n_sigma..].to_vec()).collect();
        let s = sigma
            .minimal_cone_containing(&r_rays)
            .ok_or_else(|| Error::NotContained {
                cone: cone_label(w),
            })?;
        let k = tau
            .minimal_cone_containing(&p_rays)
            .ok_or_else(|| Error::NotContained {
                cone: cone_label(w),
            })?;
        sigma_of.push(s);
        kappa_of.push(k);
    }

    for (&id, basis) in declared_lattices {
        let w = upsilon.cone(id)?;
        if basis.rows() != n_sigma + n_tau {
            return Err(Error::DimensionMismatch {
                context: format!("declared lattice of cone {}", cone_label(w)),
                expected: n_sigma + n_tau,
                got: basis.rows(),
            });
        }
        let snf = smith_normal_form(basis);
        if snf.rank() < basis.cols() {
            return Err(Error::DependentColumns);
        }
        if saturated_span_basis(basis) != *w.span_basis() {
            return Err(Error::Input(format!(
                "declared lattice of cone {} does not span the cone's linear span",
                cone_label(w)
            )));
        }
        if !is_saturated(basis, Lattice::new(n_sigma + n_tau))? {
            let factors: Vec<String> = snf
                .invariant_factors
                .iter()
                .filter(|f| !f.is_one())
                .map(|f| f.to_string())
                .collect();
            return Err(Error::NotSaturated {
                cone: cone_label(w),
                factors: format!("[{}]", factors.join(", ")),
            });
        }
    }

    let target = product_fan(sigma, tau)?;
    let surjective = support_surjective(upsilon, &target)?;

    Ok(SubdivisionMap {
        n_sigma,
        n_tau,
        sigma_of,
        kappa_of,
        support_surjective: surjective,
    })
}

/// Validate combinatorial flatness and reducedness of p: Υ → τ and compute
/// the vertex set. Failures name the offending cones.
pub fn validate_expansion(
    upsilon: ConeComplex,
    sigma: ConeComplex,
    tau: ConeComplex,
    tau_top: ConeId,
    sub: SubdivisionMap,
) -> Result<TropicalExpansion> {
    let n_sigma = sub.n_sigma;
    let n_tau = sub.n_tau;

    for id in upsilon.ids() {
        let w = upsilon.cone(id)?;
        let p_rays: Vec<IntVec> = w.rays().iter().map(|r| r[n_sigma..].to_vec()).collect();
        let image = Cone::from_rays(n_tau, &p_rays)?;
        let kappa = tau.cone(sub.kappa_of[id.0])?;
        if !image.same_cone(kappa) {
            return Err(Error::NotFlat {
                cone: cone_label(w),
                image: cone_label(&image),
            });
        }
        // reducedness: p(N_ω) = N_κ
        if kappa.dim() > 0 {
            let p_basis = w.span_basis().submatrix_rows(n_sigma..n_sigma + n_tau);
            let in_kappa = solve_integer_matrix(kappa.span_basis(), &p_basis).ok_or_else(|| {
                Error::Structural(format!(
                    "p(N_ω) does not land in N_κ for cone {}",
                    cone_label(w)
                ))
            })?;
            let snf = smith_normal_form(&in_kappa);
            if snf.rank() < kappa.dim() || !snf.invariant_factors.iter().all(|f| f.is_one()) {
                let index = snf
                    .invariant_factors
                    .iter()
                    .fold(BigInt::one(), |acc, f| acc * f);
                return Err(Error::NotReduced {
                    cone: cone_label(w),
                    index: index.to_string(),
                });
            }
        }
    }

    // vertices: cones mapped isomorphically onto τ
    let tau_dim = tau.cone(tau_top)?.dim();
    let mut vertex_cones: Vec<ConeId> = upsilon
        .ids()
        .filter(|&id| {
            sub.kappa_of[id.0] == tau_top && upsilon.cone(id).expect("cone").dim() == tau_dim
        })
        .collect();
    vertex_cones.sort_by_key(|&id| upsilon.cone(id).expect("cone").rays().to_vec());

    let mut vertices = Vec::new();
    for (i, &omega_v) in vertex_cones.iter().enumerate() {
        let w = upsilon.cone(omega_v)?;
        let b = w.span_basis();
        let p_b = b.submatrix_rows(n_sigma..n_sigma + n_tau);
        let r_b = b.submatrix_rows(0..n_sigma);
        let p_inv = inverse_unimodular(&p_b).ok_or_else(|| {
            Error::Structural(format!(
                "vertex cone {} is not unimodular over τ despite reducedness",
                cone_label(w)
            ))
        })?;
        let sigma_v = sub.sigma_of[omega_v.0];
        let sigma_cone = sigma.cone(sigma_v)?;
        let y = solve_integer_matrix(sigma_cone.span_basis(), &r_b).ok_or_else(|| {
            Error::Structural(format!(
                "r(N_ω) does not land in N_σ for vertex {}",
                cone_label(w)
            ))
        })?;
        let phi_v = y.mul(&p_inv);

        // id × (−φ_v) has kernel exactly N_{ω_v}: the square matrix whose
        // columns are the embedded N_{ω_v} basis plus a lift of N_{σ_v}
        // must be unimodular
        let d_sv = sigma_cone.dim();
        let embed = y.vstack(&p_b);
        let lift = IntMatrix::identity(d_sv).vstack(&IntMatrix::zeros(n_tau, d_sv));
        let big = embed.hstack(&lift);
        if !lattice::is_unimodular(&big) {
            return Err(Error::Structural(format!(
                "tropical position map does not identify (N_σ × N_τ)/N_ω with N_σ at vertex {}",
                cone_label(w)
            )));
        }

        vertices.push(VertexData {
            name: format!("v{i}"),
            omega_v,
            sigma_v,
            phi_v,
        });
    }

    Ok(TropicalExpansion {
        sigma,
        tau,
        tau_top,
        upsilon,
        n_sigma,
        n_tau,
        sub,
        vertices,
    })
}

/// The trivial expansion Υ = Σ × τ.
pub fn trivial_expansion(
    sigma: &ConeComplex,
    tau: &ConeComplex,
    tau_top: ConeId,
) -> Result<TropicalExpansion> {
    let upsilon = product_fan(sigma, tau)?;
    let sub = validate_open_subdivision(&upsilon, sigma, tau, &BTreeMap::new())?;
    validate_expansion(upsilon, sigma.clone(), tau.clone(), tau_top, sub)
}

/// One polyhedron of a slice: the fibre of a cone over a base point, in
/// V-representation over the rationals.
#[derive(Debug, Clone)]
pub struct SliceCell {
    pub omega: ConeId,
    /// Affine dimension, computed from the V-representation.
    pub dim: usize,
    /// Vertex positions in Σ-coordinates, sorted.
    pub vertices: Vec<RatVec>,
    /// Recession rays in Σ-coordinates, primitive, sorted.
    pub rays: Vec<IntVec>,
    /// Minimal Σ-cone containing the whole polyhedron.
    pub sigma_p: ConeId,
}

/// An oriented 1-cell with its integral slope.
#[derive(Debug, Clone)]
pub struct SliceEdge {
    pub omega: ConeId,
    /// Vertex cell at the tail (lexicographically smaller endpoint).
    pub tail: ConeId,
    /// Vertex cell at the head; None for unbounded edges.
    pub head: Option<ConeId>,
    /// Primitive integral slope in Σ-coordinates, oriented tail to head.
    pub slope: IntVec,
    pub sigma_e: ConeId,
}

#[derive(Debug, Clone)]
pub struct PolyhedralSlice {
    pub f: RatVec,
    /// Face of τ containing f in its relative interior.
    pub kappa: ConeId,
    pub cells: Vec<SliceCell>,
    pub edges: Vec<SliceEdge>,
    /// Face pairs among the cells, inherited from Υ.
    pub face_pairs: Vec<(ConeId, ConeId)>,
}

/// Position of the unique point of ω' over f, for a cell with dim ω' = dim κ.
fn vertex_position(exp: &TropicalExpansion, omega: ConeId, f: &RatVec) -> Result<RatVec> {
    let p_b = exp.p_of_basis(omega)?;
    let y = rational_solve(&p_b, f).ok_or_else(|| {
        Error::Structural("vertex cell does not project onto the base point".into())
    })?;
    let r_b = exp.r_of_basis(omega)?;
    Ok((0..exp.n_sigma)
        .map(|i| {
            (0..r_b.cols())
                .map(|j| BigRational::from_integer(r_b[(i, j)].clone()) * &y[j])
                .sum()
        })
        .collect())
}

fn affine_dim(vertices: &[RatVec], rays: &[IntVec]) -> usize {
    let Some(base) = vertices.first() else {
        return 0;
    };
    let mut dirs: Vec<IntVec> = Vec::new();
    for v in &vertices[1..] {
        let diff: RatVec = v.iter().zip(base).map(|(a, b)| a - b).collect();
        dirs.push(lattice::primitive_direction(&diff));
    }
    dirs.extend(rays.iter().cloned());
    if dirs.is_empty() {
        return 0;
    }
    lattice::rank(&IntMatrix::from_columns(base.len(), &dirs))
}

/// Intersect the fibre p^{-1}(f) with the cones of Υ.
pub fn slice(exp: &TropicalExpansion, f: &[BigRational]) -> Result<PolyhedralSlice> {
    if f.len() != exp.n_tau {
        return Err(Error::DimensionMismatch {
            context: "slice point".into(),
            expected: exp.n_tau,
            got: f.len(),
        });
    }
    let kappa = exp
        .tau
        .minimal_cone_containing_point(f)
        .ok_or_else(|| Error::PointOutsideBase {
            point: format!(
                "({})",
                f.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
        })?;
    let kappa_dim = exp.tau.cone(kappa)?.dim();

    let cell_ids: Vec<ConeId> = exp
        .upsilon
        .ids()
        .filter(|&id| exp.sub.kappa_of[id.0] == kappa)
        .collect();

    let mut positions: BTreeMap<ConeId, RatVec> = BTreeMap::new();
    for &id in &cell_ids {
        if exp.upsilon.cone(id)?.dim() == kappa_dim {
            positions.insert(id, vertex_position(exp, id, &f.to_vec())?);
        }
    }

    let mut cells = Vec::new();
    let mut edges = Vec::new();
    for &id in &cell_ids {
        let w = exp.upsilon.cone(id)?;
        let sub_cells: Vec<ConeId> = cell_ids
            .iter()
            .copied()
            .filter(|&s| exp.upsilon.is_face_pair(s, id))
            .collect();
        let vertex_cells: Vec<ConeId> = sub_cells
            .iter()
            .copied()
            .filter(|s| positions.contains_key(s))
            .collect();
        let mut verts: Vec<RatVec> = vertex_cells.iter().map(|s| positions[s].clone()).collect();
        verts.sort();
        // recession rays: rays of ω with vanishing τ-part
        let mut rec: Vec<IntVec> = w
            .rays()
            .iter()
            .filter(|r| lattice::vec_is_zero(&r[exp.n_sigma..]))
            .map(|r| r[..exp.n_sigma].to_vec())
            .collect();
        rec.sort();

        let dim = affine_dim(&verts, &rec);
        let sigma_p = minimal_sigma_cone_for_polyhedron(exp, &verts, &rec)?;
        if dim == 1 {
            match (vertex_cells.len(), rec.len()) {
                (2, 0) => {
                    let (a, b) = (vertex_cells[0], vertex_cells[1]);
                    let (pa, pb) = (&positions[&a], &positions[&b]);
                    let (tail, head) = if pa <= pb { (a, b) } else { (b, a) };
                    let diff: RatVec = positions[&head]
                        .iter()
                        .zip(&positions[&tail])
                        .map(|(x, y)| x - y)
                        .collect();
                    edges.push(SliceEdge {
                        omega: id,
                        tail,
                        head: Some(head),
                        slope: lattice::primitive_direction(&diff),
                        sigma_e: sigma_p,
                    });
                }
                (1, 1) => {
                    edges.push(SliceEdge {
                        omega: id,
                        tail: vertex_cells[0],
                        head: None,
                        slope: rec[0].clone(),
                        sigma_e: sigma_p,
                    });
                }
                other => {
                    return Err(Error::Structural(format!(
                        "1-cell of {} has unexpected V-representation {:?}",
                        cone_label(w),
                        other
                    )))
                }
            }
        }
        cells.push(SliceCell {
            omega: id,
            dim,
            vertices: verts,
            rays: rec,
            sigma_p,
        });
    }

    let face_pairs: Vec<(ConeId, ConeId)> = cell_ids
        .iter()
        .flat_map(|&a| {
            cell_ids
                .iter()
                .filter(move |&&b| a != b && exp.upsilon.is_face_pair(a, b))
                .map(move |&b| (a, b))
        })
        .collect();

    Ok(PolyhedralSlice {
        f: f.to_vec(),
        kappa,
        cells,
        edges,
        face_pairs,
    })
}

fn minimal_sigma_cone_for_polyhedron(
    exp: &TropicalExpansion,
    vertices: &[RatVec],
    rays: &[IntVec],
) -> Result<ConeId> {
    let mut best: Option<ConeId> = None;
    for id in exp.sigma.ids() {
        let c = exp.sigma.cone(id)?;
        let ok =
            vertices.iter().all(|v| c.contains_rat(v)) && rays.iter().all(|r| c.contains_int(r));
        if ok {
            best = match best {
                None => Some(id),
                Some(b) if c.dim() < exp.sigma.cone(b)?.dim() => Some(id),
                keep => keep,
            };
        }
    }
    best.ok_or_else(|| Error::Structural("polyhedron not contained in any cone of Σ".into()))
}

/// The combinatorial type over the relative interior of a face of τ: the
/// abstract cell poset with σ_P markings and oriented edge slopes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialType {
    pub kappa: ConeId,
    /// (cell, affine dim, σ_P)
    pub cells: Vec<(ConeId, usize, ConeId)>,
    /// (edge cell, tail cell, head cell, slope, σ_E)
    pub edges: Vec<(ConeId, ConeId, Option<ConeId>, IntVec, ConeId)>,
    pub face_pairs: Vec<(ConeId, ConeId)>,
}

pub fn type_of_slice(s: &PolyhedralSlice) -> CombinatorialType {
    CombinatorialType {
        kappa: s.kappa,
        cells: s.cells.iter().map(|c| (c.omega, c.dim, c.sigma_p)).collect(),
        edges: s
            .edges
            .iter()
            .map(|e| (e.omega, e.tail, e.head, e.slope.clone(), e.sigma_e))
            .collect(),
        face_pairs: s.face_pairs.clone(),
    }
}

/// Canonical interior point of a face: the sum of its primitive ray
/// generators.
pub fn canonical_interior_point(tau: &ConeComplex, kappa: ConeId) -> Result<RatVec> {
    let c = tau.cone(kappa)?;
    let n = c.coord_rank();
    let mut f = vec![BigRational::zero(); n];
    for r in c.rays() {
        for (fi, ri) in f.iter_mut().zip(r) {
            *fi += BigRational::from_integer(ri.clone());
        }
    }
    Ok(f)
}

/// Compute the combinatorial type at the canonical interior point of κ, and
/// check it against a second interior point.
pub fn combinatorial_type(exp: &TropicalExpansion, kappa: ConeId) -> Result<CombinatorialType> {
    let f1 = canonical_interior_point(&exp.tau, kappa)?;
    let s1 = slice(exp, &f1)?;
    let t1 = type_of_slice(&s1);

    // second interior point, with distinct weights on the rays
    let c = exp.tau.cone(kappa)?;
    let n = c.coord_rank();
    let mut f2 = vec![BigRational::zero(); n];
    for (k, r) in c.rays().iter().enumerate() {
        let weight = BigRational::from_integer(BigInt::from(k as i64 + 2));
        for (fi, ri) in f2.iter_mut().zip(r) {
            *fi += &weight * BigRational::from_integer(ri.clone());
        }
    }
    let s2 = slice(exp, &f2)?;
    let t2 = type_of_slice(&s2);
    if t1 != t2 {
        return Err(Error::Structural(format!(
            "combinatorial type is not constant on the relative interior of face {kappa}"
        )));
    }
    Ok(t1)
}

#[cfg(test)]
pub mod fixtures {
    use super::*;
    use crate::lattice::vec_i64;

    fn v(x: &[i64]) -> IntVec {
        vec_i64(x)
    }

    pub fn figure1() -> TropicalExpansion {
        let sigma = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let (tau, top) = base_cone_complex(1, &[v(&[1])]).unwrap();
        let upsilon = ConeComplex::build_fan(
            3,
            &[
                vec![v(&[0, 1, 0]), v(&[1, 1, 0]), v(&[0, 1, 1])],
                vec![v(&[1, 1, 0]), v(&[1, 0, 0]), v(&[0, 1, 1])],
                vec![v(&[0, 1, 1]), v(&[1, 0, 0]), v(&[0, 0, 1])],
            ],
        )
        .unwrap();
        let sub = validate_open_subdivision(&upsilon, &sigma, &tau, &BTreeMap::new()).unwrap();
        assert!(sub.support_surjective);
        validate_expansion(upsilon, sigma, tau, top, sub).unwrap()
    }

    pub fn figure2() -> TropicalExpansion {
        let sigma =
            ConeComplex::build_fan(3, &[vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]])
                .unwrap();
        let (tau, top) = base_cone_complex(1, &[v(&[1])]).unwrap();
        let l1 = v(&[1, 0, 0, 0]);
        let l2 = v(&[0, 1, 0, 0]);
        let l3 = v(&[0, 0, 1, 0]);
        let e = v(&[0, 0, 0, 1]);
        let v1 = v(&[1, 0, 0, 1]);
        let w = v(&[0, 1, 1, 0]);
        let upsilon = ConeComplex::build_fan(
            4,
            &[
                vec![l1.clone(), l2.clone()],
                vec![l1.clone(), l3.clone()],
                vec![l2.clone(), e.clone()],
                vec![l3.clone(), e.clone()],
                vec![e.clone(), v1.clone()],
                vec![v1.clone(), l1.clone()],
                vec![v1.clone(), l2.clone()],
                vec![v1.clone(), l3.clone()],
                vec![v1.clone(), w.clone()],
                vec![w.clone(), l1.clone()],
                vec![w.clone(), e.clone()],
                vec![l2.clone(), w.clone()],
                vec![w, l3],
            ],
        )
        .unwrap();
        let sub = validate_open_subdivision(&upsilon, &sigma, &tau, &BTreeMap::new()).unwrap();
        assert!(!sub.support_surjective);
        validate_expansion(upsilon, sigma, tau, top, sub).unwrap()
    }

    pub fn final_example() -> TropicalExpansion {
        let sigma = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let (tau, top) = base_cone_complex(1, &[v(&[1])]).unwrap();
        let upsilon = ConeComplex::build_fan(
            3,
            &[
                vec![v(&[1, 0, 0]), v(&[1, 1, 0]), v(&[0, 0, 1])],
                vec![v(&[1, 1, 0]), v(&[0, 1, 1]), v(&[0, 0, 1])],
                vec![v(&[1, 1, 0]), v(&[0, 1, 0]), v(&[0, 1, 1])],
            ],
        )
        .unwrap();
        let sub = validate_open_subdivision(&upsilon, &sigma, &tau, &BTreeMap::new()).unwrap();
        assert!(sub.support_surjective);
        validate_expansion(upsilon, sigma, tau, top, sub).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::{figure1, figure2};
    use super::*;
    use crate::lattice::vec_i64;

    fn v(x: &[i64]) -> IntVec {
        vec_i64(x)
    }

    fn rat(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    #[test]
    fn figure1_validates_with_two_vertices() {
        let exp = figure1();
        assert_eq!(exp.vertices.len(), 2);
        assert_eq!(exp.vertices[0].name, "v0");
        assert_eq!(exp.vertices[1].name, "v1");
        let v0 = &exp.vertices[0];
        let v1 = &exp.vertices[1];
        assert_eq!(
            exp.upsilon.cone(v0.omega_v).unwrap().rays(),
            &[v(&[0, 0, 1])]
        );
        assert_eq!(
            exp.upsilon.cone(v1.omega_v).unwrap().rays(),
            &[v(&[0, 1, 1])]
        );
        // v0 sits over the open stratum, v1 over the l2 divisor
        assert_eq!(exp.sigma.cone(v0.sigma_v).unwrap().dim(), 0);
        assert_eq!(exp.sigma.cone(v1.sigma_v).unwrap().rays(), &[v(&[0, 1])]);
        // phi_v1 sends the generator of τ to the unit of N_{σ_v1}
        assert_eq!(v1.phi_v, IntMatrix::from_i64(vec![vec![1]]));
    }

    #[test]
    fn figure2_validates() {
        let exp = figure2();
        assert_eq!(exp.vertices.len(), 2);
        let v1 = &exp.vertices[1];
        assert_eq!(
            exp.upsilon.cone(v1.omega_v).unwrap().rays(),
            &[v(&[1, 0, 0, 1])]
        );
        assert_eq!(exp.sigma.cone(v1.sigma_v).unwrap().rays(), &[v(&[1, 0, 0])]);
    }

    #[test]
    fn vertex_count_matches_bruteforce() {
        for exp in [figure1(), figure2()] {
            let tau_dim = exp.tau.cone(exp.tau_top).unwrap().dim();
            let brute = exp
                .upsilon
                .ids()
                .filter(|&id| {
                    let w = exp.upsilon.cone(id).unwrap();
                    let p_rays: Vec<IntVec> =
                        w.rays().iter().map(|r| r[exp.n_sigma..].to_vec()).collect();
                    let img = Cone::from_rays(exp.n_tau, &p_rays).unwrap();
                    img.same_cone(exp.tau.cone(exp.tau_top).unwrap()) && w.dim() == tau_dim
                })
                .count();
            assert_eq!(brute, exp.vertices.len());
        }
    }

    #[test]
    fn reducedness_violation_detected() {
        // the 2-cone <(1,0,0),(0,1,2)> maps onto τ = R_{>=0} but its lattice
        // image is 2Z
        let sigma = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let (tau, top) = base_cone_complex(1, &[v(&[1])]).unwrap();
        let upsilon =
            ConeComplex::build_fan(3, &[vec![v(&[1, 0, 0]), v(&[0, 1, 2])]]).unwrap();
        let sub = validate_open_subdivision(&upsilon, &sigma, &tau, &BTreeMap::new()).unwrap();
        let err = validate_expansion(upsilon, sigma, tau, top, sub).unwrap_err();
        match err {
            Error::NotReduced { index, .. } => assert_eq!(index, "2"),
            other => panic!("expected reducedness failure, got {other}"),
        }
    }

    #[test]
    fn flatness_violation_detected() {
        // τ = R^2_{>=0}: a cone over the diagonal of τ is not flat
        let sigma = ConeComplex::build_fan(0, &[]).unwrap();
        let (tau, top) = base_cone_complex(2, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        let upsilon = ConeComplex::build_fan(2, &[vec![v(&[1, 1])]]).unwrap();
        let sub = validate_open_subdivision(&upsilon, &sigma, &tau, &BTreeMap::new()).unwrap();
        let err = validate_expansion(upsilon, sigma, tau, top, sub).unwrap_err();
        assert!(matches!(err, Error::NotFlat { .. }));
    }

    #[test]
    fn declared_lattice_saturation() {
        let sigma = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let (tau, _top) = base_cone_complex(1, &[v(&[1])]).unwrap();
        let upsilon = ConeComplex::build_fan(3, &[vec![v(&[0, 1, 0])]]).unwrap();
        let ray = upsilon.find_cone_by_rays(&[v(&[0, 1, 0])]).unwrap();
        let mut declared = BTreeMap::new();
        declared.insert(ray, IntMatrix::from_columns(3, &[v(&[0, 2, 0])]));
        let err = validate_open_subdivision(&upsilon, &sigma, &tau, &declared).unwrap_err();
        match err {
            Error::NotSaturated { factors, .. } => assert!(factors.contains('2')),
            other => panic!("expected saturation failure, got {other}"),
        }
    }

    #[test]
    fn trivial_expansion_single_vertex() {
        let sigma = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let (tau, top) = base_cone_complex(1, &[v(&[1])]).unwrap();
        let exp = trivial_expansion(&sigma, &tau, top).unwrap();
        assert_eq!(exp.vertices.len(), 1);
        let v0 = &exp.vertices[0];
        assert_eq!(exp.sigma.cone(v0.sigma_v).unwrap().dim(), 0);
        assert!(v0.phi_v.is_zero());
        assert!(exp.sub.support_surjective);
    }

    #[test]
    fn figure1_slice_at_one() {
        let exp = figure1();
        let s = slice(&exp, &[rat(1)]).unwrap();
        let mut vertex_positions: Vec<RatVec> = s
            .cells
            .iter()
            .filter(|c| c.dim == 0)
            .map(|c| c.vertices[0].clone())
            .collect();
        vertex_positions.sort();
        assert_eq!(
            vertex_positions,
            vec![vec![rat(0), rat(0)], vec![rat(0), rat(1)]]
        );
        // the bounded edge v0-v1 has slope (0,1) and σ_E the l2 ray
        let bounded: Vec<&SliceEdge> = s.edges.iter().filter(|e| e.head.is_some()).collect();
        assert_eq!(bounded.len(), 1);
        assert_eq!(bounded[0].slope, v(&[0, 1]));
        assert_eq!(
            exp.sigma.cone(bounded[0].sigma_e).unwrap().rays(),
            &[v(&[0, 1])]
        );
        assert_eq!(s.edges.len(), 5);
        // polyhedral-conical dictionary at the top face
        for cell in &s.cells {
            let w = exp.upsilon.cone(cell.omega).unwrap();
            assert_eq!(w.dim(), 1 + cell.dim);
        }
    }

    #[test]
    fn slice_at_zero_is_asymptotic_complex() {
        let exp = figure1();
        let s = slice(&exp, &[rat(0)]).unwrap();
        let zero_face = exp.tau.zero_cone().unwrap();
        assert_eq!(s.kappa, zero_face);
        for cell in &s.cells {
            let w = exp.upsilon.cone(cell.omega).unwrap();
            assert_eq!(exp.sub.kappa_of[cell.omega.0], zero_face);
            assert_eq!(w.dim(), cell.dim);
        }
        // conical cells of figure 1: 0, three rays (l1, l2, mid), two 2-cones
        assert_eq!(s.cells.len(), 6);
    }

    #[test]
    fn type_constant_on_interior() {
        let exp = figure2();
        let t = combinatorial_type(&exp, exp.tau_top).unwrap();
        assert_eq!(t.kappa, exp.tau_top);
        let t0 = combinatorial_type(&exp, exp.tau.zero_cone().unwrap()).unwrap();
        assert!(!t0.cells.is_empty());
    }

    #[test]
    fn slice_outside_base_rejected() {
        let exp = figure1();
        let err = slice(&exp, &[rat(-1)]).unwrap_err();
        assert!(matches!(err, Error::PointOutsideBase { .. }));
    }
}
