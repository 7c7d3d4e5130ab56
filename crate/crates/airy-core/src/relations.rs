//! Compatibility identities that make four tensors an Airy structure.
//!
//! A tuple `(A, B, C, D)` defines a consistent family of quadratic
//! differential constraints exactly when four families of polynomial
//! identities hold: three quartic-index families coupling the arity-3
//! tensors (tagged `BB-AC`, `BC`, `BA`) and one family for the scalar part
//! (tagged `D`).  The validator evaluates every instance and reports all
//! nonzero residuals — exhaustively, not fail-fast, so that perturbation
//! experiments can see the full failure pattern.
//!
//! For truncated graded families, free indices range over the certified
//! window (see [`crate::structure::Grading::window`]) while summation
//! indices run over the whole stored range; within that window the
//! residuals agree with the untruncated family's, by the support bounds
//! recorded in the certificate.

use rayon::prelude::*;
use std::fmt::{self, Display};

use crate::error::AiryError;
use crate::scalar::{Rat, Ring};
use crate::structure::AiryStructure;
use crate::tensor::{SparseTensor, Symmetry};

/// Which identity family a violation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationTag {
    /// Full symmetry of the cubic tensor (only loaders can observe a
    /// violation: storage is canonical).
    SymA,
    BbAc,
    Bc,
    Ba,
    D,
    FJacobi,
}

impl Display for RelationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RelationTag::SymA => "SymA",
            RelationTag::BbAc => "BB-AC",
            RelationTag::Bc => "BC",
            RelationTag::Ba => "BA",
            RelationTag::D => "D",
            RelationTag::FJacobi => "f-Jacobi",
        };
        write!(f, "{s}")
    }
}

/// One violated identity instance.
#[derive(Clone, Debug)]
pub struct Violation<K> {
    pub tag: RelationTag,
    pub indices: Vec<u32>,
    /// The nonzero residual; absent for loader-detected symmetry clashes,
    /// where `detail` carries the conflicting values instead.
    pub residual: Option<K>,
    pub detail: Option<String>,
}

impl<K: Ring> Display for Violation<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.tag, self.indices)?;
        if let Some(r) = &self.residual {
            write!(f, " residual {r}")?;
        }
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

/// Exhaustive validation outcome; empty iff the structure is valid.
#[derive(Clone, Debug)]
pub struct RelationReport<K> {
    pub violations: Vec<Violation<K>>,
    /// External indices ranged over `0..window_dim`.
    pub window_dim: usize,
    pub checked_d: bool,
}

impl<K: Ring> RelationReport<K> {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    /// Count of violations per tag, in tag order, skipping zero counts.
    pub fn summary(&self) -> String {
        if self.is_ok() {
            return "OK".to_string();
        }
        let tags = [
            RelationTag::SymA,
            RelationTag::BbAc,
            RelationTag::Bc,
            RelationTag::Ba,
            RelationTag::D,
            RelationTag::FJacobi,
        ];
        let parts: Vec<String> = tags
            .iter()
            .filter_map(|t| {
                let n = self.violations.iter().filter(|v| v.tag == *t).count();
                (n > 0).then(|| format!("{t}: {n}"))
            })
            .collect();
        format!("FAIL ({})", parts.join(", "))
    }

    /// Prepend loader-reported duplicate conflicts as `SymA` violations.
    pub fn absorb_duplicate_reports(&mut self, reports: &[String]) {
        for (pos, r) in reports.iter().enumerate() {
            self.violations.insert(
                pos,
                Violation {
                    tag: RelationTag::SymA,
                    indices: vec![],
                    residual: None,
                    detail: Some(r.clone()),
                },
            );
        }
    }
}

/// External-index bound: the certified window for graded structures, the
/// full range otherwise.
fn window_dim<K: Ring>(s: &AiryStructure<K>) -> usize {
    match &s.grading {
        None => s.dim(),
        Some(g) => (g.window().min(g.max_mode) + 1) * g.colors,
    }
}

/// Evaluate every identity instance with free indices below the window.
///
/// `check_d` controls whether the scalar-part family is included; with it
/// off, the check covers exactly the "classical" part of the data.
pub fn validate_relations<K>(s: &AiryStructure<K>, check_d: bool) -> RelationReport<K>
where
    K: Ring + Send + Sync,
{
    let d = s.dim();
    let e = window_dim(s);
    let half = K::from_rat(&Rat::new(1.into(), 2.into()));

    let pairs: Vec<(u32, u32)> = (0..e as u32)
        .flat_map(|i| ((i + 1)..e as u32).map(move |j| (i, j)))
        .collect();

    let mut violations: Vec<Violation<K>> = pairs
        .par_iter()
        .flat_map_iter(|&(i, j)| {
            let mut bad = Vec::new();
            for k in 0..e as u32 {
                for l in 0..e as u32 {
                    let mut bbac = K::zero();
                    let mut bc = K::zero();
                    let mut ba = K::zero();
                    for a in 0..d as u32 {
                        // BB-AC family.
                        bbac = bbac
                            + s.b.get(&[i, j, a]) * s.b.get(&[a, k, l])
                            + s.b.get(&[i, k, a]) * s.b.get(&[j, a, l])
                            + s.c.get(&[i, l, a]) * s.a.get(&[j, a, k])
                            - s.b.get(&[j, i, a]) * s.b.get(&[a, k, l])
                            - s.b.get(&[j, k, a]) * s.b.get(&[i, a, l])
                            - s.c.get(&[j, l, a]) * s.a.get(&[i, a, k]);
                        // BC family.
                        bc = bc
                            + s.b.get(&[i, j, a]) * s.c.get(&[a, k, l])
                            + s.c.get(&[i, k, a]) * s.b.get(&[j, a, l])
                            + s.c.get(&[i, l, a]) * s.b.get(&[j, a, k])
                            - s.b.get(&[j, i, a]) * s.c.get(&[a, k, l])
                            - s.c.get(&[j, k, a]) * s.b.get(&[i, a, l])
                            - s.c.get(&[j, l, a]) * s.b.get(&[i, a, k]);
                        // BA family.
                        ba = ba
                            + s.b.get(&[i, j, a]) * s.a.get(&[a, k, l])
                            + s.b.get(&[i, k, a]) * s.a.get(&[j, a, l])
                            + s.b.get(&[i, l, a]) * s.a.get(&[j, a, k])
                            - s.b.get(&[j, i, a]) * s.a.get(&[a, k, l])
                            - s.b.get(&[j, k, a]) * s.a.get(&[i, a, l])
                            - s.b.get(&[j, l, a]) * s.a.get(&[i, a, k]);
                    }
                    for (tag, r) in [
                        (RelationTag::BbAc, bbac),
                        (RelationTag::Bc, bc),
                        (RelationTag::Ba, ba),
                    ] {
                        if !r.is_zero() {
                            bad.push(Violation {
                                tag,
                                indices: vec![i, j, k, l],
                                residual: Some(r),
                                detail: None,
                            });
                        }
                    }
                }
            }
            if check_d {
                let mut r = K::zero();
                for a in 0..d as u32 {
                    r = r + (s.b.get(&[i, j, a]) - s.b.get(&[j, i, a])) * s.d.get(&[a]);
                    for b in 0..d as u32 {
                        r = r
                            + half.mul_ref(
                                &(s.c.get(&[i, a, b]) * s.a.get(&[j, a, b])
                                    - s.c.get(&[j, a, b]) * s.a.get(&[i, a, b])),
                            );
                    }
                }
                if !r.is_zero() {
                    bad.push(Violation {
                        tag: RelationTag::D,
                        indices: vec![i, j],
                        residual: Some(r),
                        detail: None,
                    });
                }
            }
            bad
        })
        .collect();

    // Deterministic report order regardless of scheduling.
    violations.sort_by(|x, y| (x.indices.clone(), format!("{}", x.tag)).cmp(&(y.indices.clone(), format!("{}", y.tag))));

    RelationReport {
        violations,
        window_dim: e,
        checked_d: check_d,
    }
}

/// Commutation constants `f^k_{ij} = B^i_{jk} - B^j_{ik}` (key `(i,j,k)`),
/// together with every Jacobi-identity violation of the returned tensor.
///
/// For a valid structure the violation list is empty; it is reported
/// rather than asserted so invalid candidates can still be examined.
pub fn structure_constants<K: Ring>(
    s: &AiryStructure<K>,
) -> (SparseTensor<K>, Vec<Violation<K>>) {
    let d = s.dim();
    let e = window_dim(s);
    let mut f = SparseTensor::new(3, d, Symmetry::None);
    for i in 0..d as u32 {
        for j in 0..d as u32 {
            if i == j {
                continue;
            }
            for k in 0..d as u32 {
                let v = s.b.get(&[i, j, k]) - s.b.get(&[j, i, k]);
                f.set(&[i, j, k], v);
            }
        }
    }
    let mut bad = Vec::new();
    for i in 0..e as u32 {
        for j in (i + 1)..e as u32 {
            for k in (j + 1)..e as u32 {
                for l in 0..e as u32 {
                    let mut r = K::zero();
                    for m in 0..d as u32 {
                        r = r
                            + f.get(&[i, j, m]) * f.get(&[m, k, l])
                            + f.get(&[j, k, m]) * f.get(&[m, i, l])
                            + f.get(&[k, i, m]) * f.get(&[m, j, l]);
                    }
                    if !r.is_zero() {
                        bad.push(Violation {
                            tag: RelationTag::FJacobi,
                            indices: vec![i, j, k, l],
                            residual: Some(r),
                            detail: None,
                        });
                    }
                }
            }
        }
    }
    (f, bad)
}

/// The canonical scalar part `D_ref^i = ½ Σ_a B^i_{aa}`.
///
/// Defined only for genuinely finite structures: on a truncation the trace
/// would depend on the cutoff, reflecting that it does not exist for the
/// infinite family at all.
pub fn d_ref<K: Ring>(s: &AiryStructure<K>) -> Result<Vec<K>, AiryError> {
    if s.grading.is_some() {
        return Err(AiryError::Unsupported(
            "trace undefined for graded structures".into(),
        ));
    }
    let d = s.dim();
    let half = K::from_rat(&Rat::new(1.into(), 2.into()));
    Ok((0..d as u32)
        .map(|i| {
            let mut t = K::zero();
            for a in 0..d as u32 {
                t.add_assign_ref(&s.b.get(&[i, a, a]));
            }
            half.mul_ref(&t)
        })
        .collect())
}

/// Does the candidate scalar part complete `(A, B, C)` admissibly?
///
/// Valid iff `D - D_ref` annihilates every commutation constant:
/// `Σ_k (D^k − D_ref^k) f^k_{ij} = 0` for all `i < j`.  Violating pairs
/// are returned.
pub fn d_admissible<K: Ring>(s: &AiryStructure<K>) -> Result<Vec<Violation<K>>, AiryError> {
    let dref = d_ref(s)?;
    let (f, _) = structure_constants(s);
    let d = s.dim();
    let mut bad = Vec::new();
    for i in 0..d as u32 {
        for j in (i + 1)..d as u32 {
            let mut r = K::zero();
            for k in 0..d as u32 {
                let diff = s.d.get(&[k]) - dref[k as usize].clone();
                r = r + diff * f.get(&[i, j, k]);
            }
            if !r.is_zero() {
                bad.push(Violation {
                    tag: RelationTag::D,
                    indices: vec![i, j],
                    residual: Some(r),
                    detail: Some("admissibility".into()),
                });
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::structure::FieldSpec;

    /// Zero tensors trivially satisfy everything.
    #[test]
    fn zero_structure_is_valid() {
        let s: AiryStructure<Rat> = AiryStructure::new("zero", 3, FieldSpec::Rational);
        let rep = validate_relations(&s, true);
        assert!(rep.is_ok());
        assert_eq!(rep.summary(), "OK");
    }

    /// Any cubic part with vanishing B and C is consistent, for any D.
    #[test]
    fn pure_cubic_part_is_valid() {
        let mut s: AiryStructure<Rat> = AiryStructure::new("pure-a", 3, FieldSpec::Rational);
        s.a.set(&[0, 0, 0], rat(3, 1));
        s.a.set(&[0, 1, 2], rat(-7, 2));
        s.a.set(&[2, 2, 2], rat(1, 5));
        s.d.set(&[0], rat(9, 4));
        s.d.set(&[2], rat(-1, 3));
        assert!(validate_relations(&s, true).is_ok());
        // ... and with B = 0 the commutation constants vanish, so every D
        // is admissible against D_ref = 0.
        assert!(d_admissible(&s).unwrap().is_empty());
        assert_eq!(d_ref(&s).unwrap(), vec![rat(0, 1); 3]);
    }

    /// A generic perturbation of a valid structure breaks specific families.
    #[test]
    fn broken_structure_reports_residuals() {
        // Two commuting generators plus a B entry that fails to close.
        let mut s: AiryStructure<Rat> = AiryStructure::new("bad", 2, FieldSpec::Rational);
        s.a.set(&[0, 0, 0], rat(1, 1));
        s.b.set(&[0, 1, 1], rat(1, 1));
        s.c.set(&[1, 1, 1], rat(1, 1));
        let rep = validate_relations(&s, true);
        assert!(!rep.is_ok());
        assert_eq!(rep.summary(), "FAIL (BC: 1)");
        // Exactly one instance fails here, with a known residual.
        assert_eq!(rep.violations.len(), 1);
        let v = &rep.violations[0];
        assert_eq!(v.tag, RelationTag::Bc);
        assert_eq!(v.indices, vec![0, 1, 1, 1]);
        assert_eq!(v.residual, Some(rat(-1, 1)));
    }

    #[test]
    fn commutation_constants_and_jacobi() {
        // B with a genuinely antisymmetric part.
        let mut s: AiryStructure<Rat> = AiryStructure::new("f", 2, FieldSpec::Rational);
        s.b.set(&[0, 1, 1], rat(2, 1));
        s.b.set(&[1, 0, 1], rat(3, 1));
        let (f, jac) = structure_constants(&s);
        assert_eq!(f.get(&[0, 1, 1]), rat(-1, 1));
        assert_eq!(f.get(&[1, 0, 1]), rat(1, 1));
        assert!(f.get(&[0, 1, 0]).is_zero());
        // Antisymmetry f^k_{ij} = -f^k_{ji} holds by construction.
        assert_eq!(f.get(&[0, 1, 1]), -f.get(&[1, 0, 1]));
        // Dimension 2: Jacobi has no room to fail.
        assert!(jac.is_empty());
    }

    #[test]
    fn trace_rejected_on_graded() {
        use crate::structure::Grading;
        let g = Grading {
            colors: 1,
            max_mode: 4,
            rule: "test window=1".into(),
        };
        let s: AiryStructure<Rat> =
            AiryStructure::new_graded("g", g, FieldSpec::Rational);
        assert!(d_ref(&s).is_err());
        // Validation restricts free indices to the declared window.
        let rep = validate_relations(&s, true);
        assert_eq!(rep.window_dim, 2);
    }

    #[test]
    fn loader_duplicates_become_symmetry_violations() {
        let s: AiryStructure<Rat> = AiryStructure::new("dup", 1, FieldSpec::Rational);
        let mut rep = validate_relations(&s, true);
        rep.absorb_duplicate_reports(&["A[0, 0, 0]: 1 vs 2".to_string()]);
        assert!(!rep.is_ok());
        assert_eq!(rep.violations[0].tag, RelationTag::SymA);
        assert!(rep.summary().contains("SymA: 1"));
    }
}
