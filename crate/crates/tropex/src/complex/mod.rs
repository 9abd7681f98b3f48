//! Cones, generalised fans and abstract cone complexes, with the star,
//! quotient, product and isomorphism toolkit.
//!
//! Two flavours of complex coexist. Embedded fans live in a shared ambient
//! lattice and enforce the intersection-is-a-face condition; they are what
//! user input produces. Abstract complexes carry one lattice per cone with
//! explicit injective face maps; quotients of stars land here, since their
//! cone images may overlap in the quotient lattice.

pub mod iso;

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    self, integer_kernel, rat_dot, rational_solve, saturated_span_basis, smith_normal_form,
    solve_integer_linear, solve_integer_matrix, IntMatrix, IntVec, Lattice,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConeId(pub usize);

impl std::fmt::Display for ConeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A strictly convex rational polyhedral cone together with its lattice.
///
/// Rays are stored canonically: primitive, extremal, lexicographically
/// sorted. The lattice N_σ is the saturation of the linear span inside the
/// coordinate lattice; `span_basis` holds a canonical basis of it.
#[derive(Debug, Clone)]
pub struct Cone {
    coord_rank: usize,
    rays: Vec<IntVec>,
    dim: usize,
    span_basis: IntMatrix,
    rays_in_span: Vec<IntVec>,
    /// Facet inequalities in span coordinates; empty iff dim 0.
    facet_normals: Vec<IntVec>,
    /// The same inequalities as integral functionals on the coordinate lattice.
    ambient_normals: Vec<IntVec>,
    /// Integral equations cutting out the linear span.
    span_equations: IntMatrix,
}

fn pretty_rays(rays: &[IntVec]) -> String {
    let body: Vec<String> = rays
        .iter()
        .map(|r| {
            let coords: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            format!("({})", coords.join(","))
        })
        .collect();
    format!("<{}>", body.join(", "))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

impl Cone {
    /// The zero cone in a coordinate space of the given rank.
    pub fn zero(coord_rank: usize) -> Cone {
        Cone {
            coord_rank,
            rays: Vec::new(),
            dim: 0,
            span_basis: IntMatrix::zeros(coord_rank, 0),
            rays_in_span: Vec::new(),
            facet_normals: Vec::new(),
            ambient_normals: Vec::new(),
            span_equations: IntMatrix::identity(coord_rank),
        }
    }

    /// Canonicalise a generating set into a cone. Fails when the generated
    /// cone is not strictly convex.
    pub fn from_rays(coord_rank: usize, generators: &[IntVec]) -> Result<Cone> {
        for g in generators {
            if g.len() != coord_rank {
                return Err(Error::DimensionMismatch {
                    context: "cone generator length".into(),
                    expected: coord_rank,
                    got: g.len(),
                });
            }
        }
        let mut gens: Vec<IntVec> = generators
            .iter()
            .filter(|g| !lattice::vec_is_zero(g))
            .map(|g| lattice::primitive(g))
            .collect();
        gens.sort();
        gens.dedup();
        if gens.is_empty() {
            return Ok(Cone::zero(coord_rank));
        }

        let gen_matrix = IntMatrix::from_columns(coord_rank, &gens);
        let span_basis = saturated_span_basis(&gen_matrix);
        let dim = span_basis.cols();
        let gens_in_span: Vec<IntVec> = gens
            .iter()
            .map(|g| {
                solve_integer_linear(&span_basis, g)
                    .expect("generator lies in the saturated span lattice")
            })
            .collect();

        // Candidate facet normals from (dim-1)-subsets of the generators.
        let mut normals: BTreeSet<IntVec> = BTreeSet::new();
        for subset in combinations(gens.len(), dim.saturating_sub(1)) {
            let rows: Vec<IntVec> = subset.iter().map(|&i| gens_in_span[i].clone()).collect();
            let mat = if rows.is_empty() {
                IntMatrix::zeros(0, dim)
            } else {
                IntMatrix::from_rows(rows)
            };
            let kernel = integer_kernel(&mat);
            if kernel.cols() != 1 {
                continue;
            }
            let h = lattice::primitive(&kernel.column(0));
            let mut pos = true;
            let mut neg = true;
            for g in &gens_in_span {
                let d = lattice::dot(&h, g);
                if d.is_positive() {
                    neg = false;
                } else if d.is_negative() {
                    pos = false;
                }
            }
            if pos {
                normals.insert(h);
            } else if neg {
                normals.insert(lattice::vec_neg(&h));
            }
        }
        let facet_normals: Vec<IntVec> = normals.into_iter().collect();

        // Pointedness: the facet normals must span the dual of the span.
        let normal_rank = if facet_normals.is_empty() {
            0
        } else {
            lattice::rank(&IntMatrix::from_rows(facet_normals.clone()))
        };
        if normal_rank != dim {
            return Err(Error::NotStrictlyConvex {
                rays: pretty_rays(&gens),
            });
        }

        // Keep extremal generators only: active normals of rank dim-1.
        let mut rays = Vec::new();
        let mut rays_in_span = Vec::new();
        for (g, gs) in gens.iter().zip(&gens_in_span) {
            let active: Vec<IntVec> = facet_normals
                .iter()
                .filter(|h| lattice::dot(h, gs).is_zero())
                .cloned()
                .collect();
            let r = if active.is_empty() {
                0
            } else {
                lattice::rank(&IntMatrix::from_rows(active))
            };
            if r + 1 == dim {
                rays.push(g.clone());
                rays_in_span.push(gs.clone());
            }
        }

        let ambient_normals: Vec<IntVec> = facet_normals
            .iter()
            .map(|h| {
                solve_integer_linear(&span_basis.transpose(), h)
                    .expect("saturated span basis admits integral normal lifts")
            })
            .collect();
        let span_equations = integer_kernel(&span_basis.transpose()).transpose();

        Ok(Cone {
            coord_rank,
            rays,
            dim,
            span_basis,
            rays_in_span,
            facet_normals,
            ambient_normals,
            span_equations,
        })
    }

    pub fn coord_rank(&self) -> usize {
        self.coord_rank
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.dim)
    }

    /// Canonical basis of N_σ = span(σ) ∩ Z^n, as columns.
    pub fn span_basis(&self) -> &IntMatrix {
        &self.span_basis
    }

    pub fn rays_in_span(&self) -> &[IntVec] {
        &self.rays_in_span
    }

    pub fn facet_normals(&self) -> &[IntVec] {
        &self.facet_normals
    }

    pub fn ambient_normals(&self) -> &[IntVec] {
        &self.ambient_normals
    }

    pub fn span_equations(&self) -> &IntMatrix {
        &self.span_equations
    }

    pub fn same_cone(&self, other: &Cone) -> bool {
        self.coord_rank == other.coord_rank && self.rays == other.rays
    }

    pub fn is_zero_cone(&self) -> bool {
        self.dim == 0
    }

    /// N_σ-coordinates of an integral point of the span, if it lies there.
    pub fn span_coords_int(&self, x: &[BigInt]) -> Option<IntVec> {
        solve_integer_linear(&self.span_basis, x)
    }

    pub fn contains_int(&self, x: &[BigInt]) -> bool {
        match self.span_coords_int(x) {
            None => false,
            Some(y) => self
                .facet_normals
                .iter()
                .all(|h| !lattice::dot(h, &y).is_negative()),
        }
    }

    pub fn contains_rat(&self, x: &[BigRational]) -> bool {
        // span_basis has full column rank, so the solution is unique when it
        // exists and None means x is outside the span
        match rational_solve(&self.span_basis, x) {
            None => false,
            Some(y) => self
                .facet_normals
                .iter()
                .all(|h| !rat_dot(h, &y).is_negative()),
        }
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.rays.iter().all(|r| self.contains_int(r))
    }

    /// Rays of the minimal face of this cone containing the given points
    /// (points in span coordinates of `self`).
    fn minimal_face_rays(&self, points: &[IntVec]) -> Vec<IntVec> {
        let active: Vec<&IntVec> = self
            .facet_normals
            .iter()
            .filter(|h| points.iter().all(|p| lattice::dot(h, p).is_zero()))
            .collect();
        self.rays
            .iter()
            .zip(&self.rays_in_span)
            .filter(|(_, rs)| active.iter().all(|h| lattice::dot(h, rs).is_zero()))
            .map(|(r, _)| r.clone())
            .collect()
    }

    /// True iff `self` is a face of `other`.
    pub fn is_face_of(&self, other: &Cone) -> bool {
        if self.coord_rank != other.coord_rank {
            return false;
        }
        let mut pts = Vec::new();
        for r in &self.rays {
            match other.span_coords_int(r) {
                Some(y) if other
                    .facet_normals
                    .iter()
                    .all(|h| !lattice::dot(h, &y).is_negative()) =>
                {
                    pts.push(y)
                }
                _ => return false,
            }
        }
        let face_rays = other.minimal_face_rays(&pts);
        let mut mine = self.rays.clone();
        let mut theirs = face_rays;
        mine.sort();
        theirs.sort();
        mine == theirs
    }

    /// All faces, including the zero cone and the cone itself.
    pub fn faces(&self) -> Vec<Cone> {
        if self.dim == 0 {
            return vec![self.clone()];
        }
        // Faces are determined by their extremal ray subsets; close the facet
        // ray sets under intersection.
        let full: BTreeSet<usize> = (0..self.rays.len()).collect();
        let facet_sets: Vec<BTreeSet<usize>> = self
            .facet_normals
            .iter()
            .map(|h| {
                (0..self.rays.len())
                    .filter(|&i| lattice::dot(h, &self.rays_in_span[i]).is_zero())
                    .collect()
            })
            .collect();
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        seen.insert(full.clone());
        let mut work = vec![full];
        while let Some(s) = work.pop() {
            for fs in &facet_sets {
                let inter: BTreeSet<usize> = s.intersection(fs).cloned().collect();
                if seen.insert(inter.clone()) {
                    work.push(inter);
                }
            }
        }
        let mut sets: Vec<BTreeSet<usize>> = seen.into_iter().collect();
        sets.sort_by_key(|s| (s.len(), s.iter().map(|&i| self.rays[i].clone()).collect::<Vec<_>>()));
        sets.into_iter()
            .map(|s| {
                let gens: Vec<IntVec> = s.iter().map(|&i| self.rays[i].clone()).collect();
                Cone::from_rays(self.coord_rank, &gens)
                    .expect("a face of a strictly convex cone is strictly convex")
            })
            .collect()
    }

    /// Exact intersection of two cones in the same coordinate space.
    pub fn intersection(&self, other: &Cone) -> Cone {
        assert_eq!(self.coord_rank, other.coord_rank);
        let n = self.coord_rank;
        let equations = self.span_equations.vstack(&other.span_equations);
        let joint_span = integer_kernel(&equations);
        let e = joint_span.cols();
        if e == 0 {
            return Cone::zero(n);
        }
        let mut constraints: Vec<IntVec> = Vec::new();
        for h in self.ambient_normals.iter().chain(&other.ambient_normals) {
            let restricted = IntMatrix::vec_mul(h, &joint_span);
            if !lattice::vec_is_zero(&restricted) {
                constraints.push(restricted);
            }
        }
        constraints.sort();
        constraints.dedup();

        let mut candidates: BTreeSet<IntVec> = BTreeSet::new();
        for subset in combinations(constraints.len(), e.saturating_sub(1)) {
            let rows: Vec<IntVec> = subset.iter().map(|&i| constraints[i].clone()).collect();
            let mat = if rows.is_empty() {
                IntMatrix::zeros(0, e)
            } else {
                IntMatrix::from_rows(rows)
            };
            let kernel = integer_kernel(&mat);
            if kernel.cols() != 1 {
                continue;
            }
            let v = lattice::primitive(&kernel.column(0));
            let mut pos = true;
            let mut neg = true;
            for c in &constraints {
                let d = lattice::dot(c, &v);
                if d.is_positive() {
                    neg = false;
                } else if d.is_negative() {
                    pos = false;
                }
            }
            if pos {
                candidates.insert(v);
            } else if neg {
                candidates.insert(lattice::vec_neg(&v));
            }
        }
        let gens: Vec<IntVec> = candidates
            .into_iter()
            .map(|v| joint_span.mul_vec(&v))
            .collect();
        Cone::from_rays(n, &gens)
            .expect("intersection of strictly convex cones is strictly convex")
    }

    /// Invariant factors of the ray sublattice inside N_σ; all 1 iff smooth.
    pub fn ray_index_factors(&self) -> Vec<BigInt> {
        if self.rays.is_empty() {
            return Vec::new();
        }
        let m = IntMatrix::from_columns(self.dim, &self.rays_in_span);
        smith_normal_form(&m).invariant_factors
    }

    /// Multiplicity: the product of the invariant factors of the ray
    /// sublattice, i.e. its index in N_σ for simplicial cones.
    pub fn multiplicity(&self) -> BigInt {
        self.ray_index_factors()
            .iter()
            .fold(BigInt::one(), |acc, f| acc * f)
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }
}

/// True iff the primitive ray generators extend to a basis of the lattice.
pub fn is_smooth(cone: &Cone) -> bool {
    if cone.n_rays() != cone.dim() {
        return false;
    }
    cone.ray_index_factors().iter().all(|f| f.is_one())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Flavor {
    EmbeddedFan { ambient: Lattice },
    Abstract,
}

/// A diagram of cones glued along faces. See the module docs for the two
/// flavours.
#[derive(Debug, Clone)]
pub struct ConeComplex {
    pub flavor: Flavor,
    cones: Vec<Cone>,
    /// Strict face relation (face, cone), transitively closed.
    face_pairs: BTreeSet<(ConeId, ConeId)>,
    /// Abstract flavour only: injective lattice maps N_face -> N_cone.
    face_maps: BTreeMap<(ConeId, ConeId), IntMatrix>,
}

impl ConeComplex {
    /// Build an embedded fan from listed cones; faces are closed over and the
    /// pairwise intersection condition is verified.
    pub fn build_fan(ambient_rank: usize, cone_ray_lists: &[Vec<IntVec>]) -> Result<ConeComplex> {
        let mut cones: Vec<Cone> = vec![Cone::zero(ambient_rank)];
        for rays in cone_ray_lists {
            let c = Cone::from_rays(ambient_rank, rays)?;
            for f in c.faces() {
                if !cones.iter().any(|existing| existing.same_cone(&f)) {
                    cones.push(f);
                }
            }
        }
        cones.sort_by_key(|c| (c.dim(), c.rays().to_vec()));

        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                let inter = cones[i].intersection(&cones[j]);
                if !inter.is_face_of(&cones[i]) || !inter.is_face_of(&cones[j]) {
                    return Err(Error::OverlappingCones {
                        a: pretty_rays(cones[i].rays()),
                        b: pretty_rays(cones[j].rays()),
                    });
                }
            }
        }

        let mut face_pairs = BTreeSet::new();
        for i in 0..cones.len() {
            for j in 0..cones.len() {
                if i != j && cones[i].is_face_of(&cones[j]) {
                    face_pairs.insert((ConeId(i), ConeId(j)));
                }
            }
        }
        Ok(ConeComplex {
            flavor: Flavor::EmbeddedFan {
                ambient: Lattice::new(ambient_rank),
            },
            cones,
            face_pairs,
            face_maps: BTreeMap::new(),
        })
    }

    /// Assemble an abstract complex and verify the face-map axioms: maps are
    /// injective, carry faces onto faces identifying lattices, compose, and
    /// there is at most one map per pair.
    pub fn new_abstract(
        cones: Vec<Cone>,
        face_maps: BTreeMap<(ConeId, ConeId), IntMatrix>,
    ) -> Result<ConeComplex> {
        let mut face_pairs = BTreeSet::new();
        for (&(f, c), m) in &face_maps {
            if f == c {
                return Err(Error::Structural("identity face maps are implicit".into()));
            }
            let fc = &cones[f.0];
            let cc = &cones[c.0];
            if m.rows() != cc.dim() || m.cols() != fc.dim() {
                return Err(Error::Structural(format!(
                    "face map {f}->{c} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    cc.dim(),
                    fc.dim()
                )));
            }
            let snf = smith_normal_form(m);
            if snf.rank() != fc.dim() || !snf.invariant_factors.iter().all(|x| x.is_one()) {
                return Err(Error::Structural(format!(
                    "face map {f}->{c} is not a saturated lattice embedding"
                )));
            }
            let image_rays: Vec<IntVec> = fc.rays().iter().map(|r| m.mul_vec(r)).collect();
            let image = Cone::from_rays(cc.dim(), &image_rays)?;
            if !image.is_face_of(cc) {
                return Err(Error::Structural(format!(
                    "face map {f}->{c} does not carry the face onto a face"
                )));
            }
            face_pairs.insert((f, c));
        }
        // composition closure
        for (&(a, b), mab) in &face_maps {
            for (&(b2, c), mbc) in &face_maps {
                if b == b2 {
                    match face_maps.get(&(a, c)) {
                        Some(mac) if *mac == mbc.mul(mab) => {}
                        _ => {
                            return Err(Error::Structural(format!(
                                "face maps do not compose: {a}->{b}->{c}"
                            )))
                        }
                    }
                }
            }
        }
        for &(a, b) in &face_pairs {
            if face_pairs.contains(&(b, a)) {
                return Err(Error::Structural(format!(
                    "face relation has a cycle between {a} and {b}"
                )));
            }
        }
        Ok(ConeComplex {
            flavor: Flavor::Abstract,
            cones,
            face_pairs,
            face_maps,
        })
    }

    pub fn ambient_rank(&self) -> usize {
        match &self.flavor {
            Flavor::EmbeddedFan { ambient } => ambient.rank,
            Flavor::Abstract => 0,
        }
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ConeId> {
        (0..self.cones.len()).map(ConeId)
    }

    pub fn cone(&self, id: ConeId) -> Result<&Cone> {
        self.cones.get(id.0).ok_or(Error::UnknownCone(id.0))
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn face_pairs(&self) -> &BTreeSet<(ConeId, ConeId)> {
        &self.face_pairs
    }

    pub fn is_face_pair(&self, face: ConeId, cone: ConeId) -> bool {
        face == cone || self.face_pairs.contains(&(face, cone))
    }

    /// Strict faces of a cone that are members of the complex.
    pub fn member_faces(&self, id: ConeId) -> Vec<ConeId> {
        self.face_pairs
            .iter()
            .filter(|(_, c)| *c == id)
            .map(|(f, _)| *f)
            .collect()
    }

    /// The lattice map N_face -> N_cone, in span-basis coordinates.
    pub fn face_map(&self, face: ConeId, cone: ConeId) -> Result<IntMatrix> {
        if face == cone {
            return Ok(IntMatrix::identity(self.cone(face)?.dim()));
        }
        if !self.face_pairs.contains(&(face, cone)) {
            return Err(Error::Structural(format!(
                "no face relation {face} -> {cone}"
            )));
        }
        match &self.flavor {
            Flavor::Abstract => Ok(self.face_maps[&(face, cone)].clone()),
            Flavor::EmbeddedFan { .. } => {
                let bf = self.cone(face)?.span_basis();
                let bc = self.cone(cone)?.span_basis();
                solve_integer_matrix(bc, bf).ok_or_else(|| {
                    Error::Structural(format!(
                        "face lattice of {face} does not embed in {cone}"
                    ))
                })
            }
        }
    }

    pub fn zero_cone(&self) -> Result<ConeId> {
        self.ids()
            .find(|&id| self.cones[id.0].dim() == 0)
            .ok_or_else(|| Error::Structural("complex has no zero cone".into()))
    }

    /// Maximal cones: those that are faces of nothing else.
    pub fn maximal_cones(&self) -> Vec<ConeId> {
        self.ids()
            .filter(|&id| !self.face_pairs.iter().any(|(f, _)| *f == id))
            .collect()
    }

    /// Rays: the one-dimensional members.
    pub fn ray_cones(&self) -> Vec<ConeId> {
        self.ids().filter(|&id| self.cones[id.0].dim() == 1).collect()
    }

    pub fn find_cone_by_rays(&self, rays: &[IntVec]) -> Option<ConeId> {
        let mut sorted = rays.to_vec();
        sorted.sort();
        self.ids()
            .find(|&id| self.cones[id.0].rays() == &sorted[..])
    }

    /// Minimal member containing a rational point. Requires embedded flavour.
    pub fn minimal_cone_containing_point(&self, x: &[BigRational]) -> Option<ConeId> {
        let mut best: Option<ConeId> = None;
        for id in self.ids() {
            if self.cones[id.0].contains_rat(x) {
                best = match best {
                    None => Some(id),
                    Some(b) if self.cones[id.0].dim() < self.cones[b.0].dim() => Some(id),
                    keep => keep,
                };
            }
        }
        best
    }

    /// Minimal member containing a set of integral vectors.
    pub fn minimal_cone_containing(&self, vectors: &[IntVec]) -> Option<ConeId> {
        let mut best: Option<ConeId> = None;
        for id in self.ids() {
            if vectors.iter().all(|v| self.cones[id.0].contains_int(v)) {
                best = match best {
                    None => Some(id),
                    Some(b) if self.cones[id.0].dim() < self.cones[b.0].dim() => Some(id),
                    keep => keep,
                };
            }
        }
        if let Some(b) = best {
            // minimality is unique in a fan: the minimal cone sits inside
            // every other containing cone
            debug_assert!(self.ids().all(|id| {
                !vectors.iter().all(|v| self.cones[id.0].contains_int(v))
                    || self.cones[b.0].rays().iter().all(|r| self.cones[id.0].contains_int(r))
            }));
        }
        best
    }

    pub fn is_smooth_complex(&self) -> bool {
        self.cones.iter().all(is_smooth)
    }

    /// Star of a cone: all members containing it, an isotropic complex.
    pub fn star(&self, apex: ConeId) -> Result<IsotropicComplex> {
        self.cone(apex)?;
        let members: Vec<ConeId> = self
            .ids()
            .filter(|&id| id == apex || self.face_pairs.contains(&(apex, id)))
            .collect();
        Ok(IsotropicComplex { apex, members })
    }
}

/// St(σ, Σ): closed under intersections, not under faces; σ is the apex.
#[derive(Debug, Clone)]
pub struct IsotropicComplex {
    pub apex: ConeId,
    pub members: Vec<ConeId>,
}

/// A quotient complex Σ/σ together with the per-member projection data.
#[derive(Debug, Clone)]
pub struct QuotientComplex {
    /// Abstract complex; cone i corresponds to `members[i]` in the source.
    pub complex: ConeComplex,
    pub apex: ConeId,
    /// Source member for each quotient cone.
    pub members: Vec<ConeId>,
    /// Index of a source member in `members`.
    pub index_of: BTreeMap<ConeId, usize>,
    /// N_τ (span coords) -> N_{τ/σ} projections per source member.
    pub projections: BTreeMap<ConeId, IntMatrix>,
    /// Sections N_{τ/σ} -> N_τ per source member.
    pub sections: BTreeMap<ConeId, IntMatrix>,
}

/// Σ/σ = { τ/σ | τ ∈ St(σ, Σ) }, with the face poset inherited from the star.
pub fn quotient_complex(complex: &ConeComplex, sigma: ConeId) -> Result<QuotientComplex> {
    if !matches!(complex.flavor, Flavor::EmbeddedFan { .. }) {
        return Err(Error::Structural(
            "quotient_complex expects an embedded fan".into(),
        ));
    }
    let star = complex.star(sigma)?;
    let sigma_cone = complex.cone(sigma)?;
    let d_sigma = sigma_cone.dim();

    let mut new_cones = Vec::new();
    let mut projections = BTreeMap::new();
    let mut sections = BTreeMap::new();
    for &m in &star.members {
        let tau = complex.cone(m)?;
        let sub = complex.face_map(sigma, m)?; // N_σ inside N_τ
        let q = lattice::quotient(Lattice::new(tau.dim()), &sub)?;
        let image_rays: Vec<IntVec> = tau
            .rays_in_span()
            .iter()
            .map(|r| q.projection.mul_vec(r))
            .collect();
        let image = Cone::from_rays(tau.dim() - d_sigma, &image_rays).map_err(|_| {
            Error::Structural(format!(
                "quotient of star member {m} by {sigma} is not strictly convex"
            ))
        })?;
        if image.dim() != tau.dim() - d_sigma {
            return Err(Error::Structural(format!(
                "quotient dimension law fails for member {m}"
            )));
        }
        new_cones.push(image);
        projections.insert(m, q.projection);
        sections.insert(m, q.section);
    }

    let index_of: BTreeMap<ConeId, usize> = star
        .members
        .iter()
        .enumerate()
        .map(|(i, &m)| (m, i))
        .collect();

    let mut face_maps = BTreeMap::new();
    for (i, &m1) in star.members.iter().enumerate() {
        for (j, &m2) in star.members.iter().enumerate() {
            if m1 != m2 && complex.is_face_pair(m1, m2) {
                let incl = complex.face_map(m1, m2)?;
                let map = projections[&m2].mul(&incl).mul(&sections[&m1]);
                // independence of the section: the composite must intertwine
                // the two quotient projections
                if map.mul(&projections[&m1]) != projections[&m2].mul(&incl) {
                    return Err(Error::Structural(format!(
                        "quotient face map {m1}->{m2} is not well-defined"
                    )));
                }
                face_maps.insert((ConeId(i), ConeId(j)), map);
            }
        }
    }

    let complex_out = ConeComplex::new_abstract(new_cones, face_maps)?;
    Ok(QuotientComplex {
        complex: complex_out,
        apex: sigma,
        members: star.members,
        index_of,
        projections,
        sections,
    })
}

/// Product of two embedded fans, again an embedded fan in the concatenated
/// coordinates.
pub fn product_fan(a: &ConeComplex, b: &ConeComplex) -> Result<ConeComplex> {
    let (na, nb) = (a.ambient_rank(), b.ambient_rank());
    let mut ray_lists = Vec::new();
    for ca in a.cones() {
        for cb in b.cones() {
            let mut rays: Vec<IntVec> = Vec::new();
            for r in ca.rays() {
                let mut v = r.clone();
                v.extend(std::iter::repeat(BigInt::zero()).take(nb));
                rays.push(v);
            }
            for r in cb.rays() {
                let mut v: IntVec = std::iter::repeat(BigInt::zero()).take(na).collect();
                v.extend(r.iter().cloned());
                rays.push(v);
            }
            ray_lists.push(rays);
        }
    }
    ConeComplex::build_fan(na + nb, &ray_lists)
}

/// A product of abstract complexes, with the provenance of each factor.
#[derive(Debug, Clone)]
pub struct ProductComplex {
    pub complex: ConeComplex,
    /// new cone id -> (cone of A, cone of B)
    pub factors: Vec<(ConeId, ConeId)>,
    pub index_of: BTreeMap<(ConeId, ConeId), usize>,
}

/// Pairwise products with the product face poset; |A|·|B| cones.
pub fn product_complex(a: &ConeComplex, b: &ConeComplex) -> Result<ProductComplex> {
    let mut cones = Vec::new();
    let mut factors = Vec::new();
    for ia in a.ids() {
        for ib in b.ids() {
            let ca = a.cone(ia)?;
            let cb = b.cone(ib)?;
            let (da, db) = (ca.dim(), cb.dim());
            let mut rays: Vec<IntVec> = Vec::new();
            for r in ca.rays_in_span() {
                let mut v = r.clone();
                v.extend(std::iter::repeat(BigInt::zero()).take(db));
                rays.push(v);
            }
            for r in cb.rays_in_span() {
                let mut v: IntVec = std::iter::repeat(BigInt::zero()).take(da).collect();
                v.extend(r.iter().cloned());
                rays.push(v);
            }
            cones.push(Cone::from_rays(da + db, &rays)?);
            factors.push((ia, ib));
        }
    }
    let index_of: BTreeMap<(ConeId, ConeId), usize> = factors
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();

    let mut face_maps = BTreeMap::new();
    for (i, &(a1, b1)) in factors.iter().enumerate() {
        for (j, &(a2, b2)) in factors.iter().enumerate() {
            if i != j && a.is_face_pair(a1, a2) && b.is_face_pair(b1, b2) {
                let ma = a.face_map(a1, a2)?;
                let mb = b.face_map(b1, b2)?;
                face_maps.insert((ConeId(i), ConeId(j)), ma.block_diag(&mb));
            }
        }
    }
    let complex = ConeComplex::new_abstract(cones, face_maps)?;
    Ok(ProductComplex {
        complex,
        factors,
        index_of,
    })
}

/// Re-express an embedded fan as an abstract complex; cone i of the result
/// corresponds to cone i of the input, with rays in span-basis coordinates.
pub fn as_abstract(fan: &ConeComplex) -> Result<ConeComplex> {
    let mut cones = Vec::new();
    for c in fan.cones() {
        cones.push(Cone::from_rays(c.dim(), &c.rays_in_span().to_vec())?);
    }
    let mut face_maps = BTreeMap::new();
    for &(f, c) in fan.face_pairs() {
        face_maps.insert((f, c), fan.face_map(f, c)?);
    }
    ConeComplex::new_abstract(cones, face_maps)
}

pub fn faces(cone: &Cone) -> Vec<Cone> {
    cone.faces()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::vec_i64;

    fn v(x: &[i64]) -> IntVec {
        vec_i64(x)
    }

    #[test]
    fn quadrant_fan() {
        let fan = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        assert_eq!(fan.len(), 4);
        assert_eq!(fan.maximal_cones().len(), 1);
        assert_eq!(fan.ray_cones().len(), 2);
    }

    #[test]
    fn octant_fan_has_eight_cones() {
        let fan =
            ConeComplex::build_fan(3, &[vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]])
                .unwrap();
        assert_eq!(fan.len(), 8);
    }

    #[test]
    fn overlapping_cones_rejected() {
        let err = ConeComplex::build_fan(
            2,
            &[
                vec![v(&[1, 0]), v(&[1, 2])],
                vec![v(&[1, 1]), v(&[0, 1])],
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::OverlappingCones { .. }));
    }

    #[test]
    fn non_convex_rejected() {
        assert!(Cone::from_rays(1, &[v(&[1]), v(&[-1])]).is_err());
        assert!(Cone::from_rays(2, &[v(&[1, 0]), v(&[-1, 1]), v(&[0, -1])]).is_err());
    }

    #[test]
    fn face_counts() {
        let quadrant = Cone::from_rays(2, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(quadrant.faces().len(), 4);
        let simplicial3 =
            Cone::from_rays(3, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(simplicial3.faces().len(), 8);
        let over_square = Cone::from_rays(
            3,
            &[v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[-1, 0, 1]), v(&[0, -1, 1])],
        )
        .unwrap();
        assert_eq!(over_square.faces().len(), 10);
        assert_eq!(over_square.n_rays(), 4);
        assert!(!over_square.is_simplicial());
    }

    #[test]
    fn redundant_generator_dropped() {
        let c = Cone::from_rays(2, &[v(&[1, 0]), v(&[1, 1]), v(&[0, 1])]).unwrap();
        assert_eq!(c.n_rays(), 2);
        assert!(c.contains_int(&v(&[1, 1])));
        assert!(!c.contains_int(&v(&[-1, 0])));
    }

    #[test]
    fn smoothness() {
        assert!(is_smooth(
            &Cone::from_rays(2, &[v(&[1, 0]), v(&[0, 1])]).unwrap()
        ));
        assert!(!is_smooth(
            &Cone::from_rays(2, &[v(&[1, 0]), v(&[1, 2])]).unwrap()
        ));
        let over_square = Cone::from_rays(
            3,
            &[v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[-1, 0, 1]), v(&[0, -1, 1])],
        )
        .unwrap();
        assert!(!is_smooth(&over_square));
        // a smooth ray off the coordinate axes
        assert!(is_smooth(&Cone::from_rays(3, &[v(&[0, 1, 1])]).unwrap()));
    }

    #[test]
    fn star_members() {
        let fan = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let zero = fan.zero_cone().unwrap();
        assert_eq!(fan.star(zero).unwrap().members.len(), 4);
        let top = fan.find_cone_by_rays(&[v(&[0, 1]), v(&[1, 0])]).unwrap();
        assert_eq!(fan.star(top).unwrap().members.len(), 1);
        let ell2 = fan.find_cone_by_rays(&[v(&[0, 1])]).unwrap();
        let st = fan.star(ell2).unwrap();
        assert_eq!(st.members.len(), 2);
        assert_eq!(st.apex, ell2);
    }

    #[test]
    fn quotient_of_quadrant_by_ray() {
        let fan = ConeComplex::build_fan(2, &[vec![v(&[1, 0]), v(&[0, 1])]]).unwrap();
        let ell2 = fan.find_cone_by_rays(&[v(&[0, 1])]).unwrap();
        let q = quotient_complex(&fan, ell2).unwrap();
        assert_eq!(q.complex.len(), 2);
        let dims: Vec<usize> = q.complex.cones().iter().map(|c| c.dim()).collect();
        assert_eq!(dims, vec![0, 1]);
    }

    #[test]
    fn quotient_of_octant_by_ray() {
        let fan =
            ConeComplex::build_fan(3, &[vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]])
                .unwrap();
        let ell1 = fan.find_cone_by_rays(&[v(&[1, 0, 0])]).unwrap();
        let q = quotient_complex(&fan, ell1).unwrap();
        // {0, image of l1l2, image of l1l3, image of the octant}
        assert_eq!(q.complex.len(), 4);
        let mut dims: Vec<usize> = q.complex.cones().iter().map(|c| c.dim()).collect();
        dims.sort();
        assert_eq!(dims, vec![0, 1, 1, 2]);
        // dimension law on every member
        for (i, &m) in q.members.iter().enumerate() {
            assert_eq!(
                q.complex.cone(ConeId(i)).unwrap().dim(),
                fan.cone(m).unwrap().dim() - 1
            );
        }
    }

    #[test]
    fn product_counts() {
        // A^1-fan {0, ray} x P^1-fan {0, +ray, -ray} -> 6 cones
        let a1 = ConeComplex::build_fan(1, &[vec![v(&[1])]]).unwrap();
        let p1 = ConeComplex::build_fan(1, &[vec![v(&[1])], vec![v(&[-1])]]).unwrap();
        let a = as_abstract(&a1).unwrap();
        let b = as_abstract(&p1).unwrap();
        let prod = product_complex(&a, &b).unwrap();
        assert_eq!(prod.complex.len(), 6);

        let point = ConeComplex::build_fan(0, &[]).unwrap();
        let pt = as_abstract(&point).unwrap();
        let same = product_complex(&a, &pt).unwrap();
        assert_eq!(same.complex.len(), a.len());

        let ray = as_abstract(&a1).unwrap();
        let quad = product_complex(&ray, &ray).unwrap();
        assert_eq!(quad.complex.len(), 4);
    }

    #[test]
    fn product_fan_is_fan() {
        let a1 = ConeComplex::build_fan(1, &[vec![v(&[1])]]).unwrap();
        let quad = product_fan(&a1, &a1).unwrap();
        assert_eq!(quad.len(), 4);
        assert_eq!(quad.ambient_rank(), 2);
    }
}
