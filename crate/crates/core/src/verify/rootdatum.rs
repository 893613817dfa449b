//! Root systems extended by Z, encoded by arithmetic progressions.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::loops::LoopTag;
use crate::simple::{is_reduced_root, root_length, roots, RootKind, RootLengthClass, Weight};

use super::report::{Check, VerificationReport};

/// `residue + modulus·Z` with `0 ≤ residue < modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Progression {
    pub residue: i64,
    pub modulus: i64,
}

impl Progression {
    pub const Z: Progression = Progression { residue: 0, modulus: 1 };
    pub const EVEN: Progression = Progression { residue: 0, modulus: 2 };
    pub const ODD: Progression = Progression { residue: 1, modulus: 2 };

    pub fn new(residue: i64, modulus: i64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        Progression { residue: residue.rem_euclid(modulus), modulus }
    }

    pub fn contains(&self, g: i64) -> bool {
        (g - self.residue).rem_euclid(self.modulus) == 0
    }

    /// `{a − k·b : a ∈ self, b ∈ other}`.
    pub fn minus_multiple(&self, k: i64, other: &Progression) -> Progression {
        let m = self.modulus.gcd(&(k * other.modulus));
        Progression::new(self.residue - k * other.residue, m.max(1))
    }

    /// `{a + b}`.
    pub fn sum(&self, other: &Progression) -> Progression {
        self.minus_multiple(-1, other)
    }

    /// `{2a}` (not `S + S`).
    pub fn doubled(&self) -> Progression {
        Progression::new(2 * self.residue, 2 * self.modulus)
    }

    pub fn is_subset(&self, other: &Progression) -> bool {
        self.modulus % other.modulus == 0 && other.contains(self.residue)
    }

    pub fn intersects(&self, other: &Progression) -> bool {
        (self.residue - other.residue) % self.modulus.gcd(&other.modulus) == 0
    }

    /// The subgroup generated by a union of progressions, as its positive generator.
    pub fn generated(ps: &[Progression]) -> i64 {
        ps.iter().fold(0i64, |g, p| g.gcd(&p.residue).gcd(&p.modulus))
    }
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = if self.modulus == 1 { String::new() } else { self.modulus.to_string() };
        if self.residue == 0 {
            write!(f, "{m}Z")
        } else {
            write!(f, "{m}Z+{}", self.residue)
        }
    }
}

impl FromStr for Progression {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad progression {s:?} (expected e.g. Z, 2Z, 2Z+1)"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, res) = match t.split_once('+') {
            Some((h, r)) => (h.to_string(), r.parse::<i64>().map_err(|_| bad())?),
            None => (t.clone(), 0),
        };
        let m = head.strip_suffix('Z').ok_or_else(bad)?;
        let m = if m.is_empty() { 1 } else { m.parse::<i64>().map_err(|_| bad())? };
        if m <= 0 {
            return Err(bad());
        }
        Ok(Progression::new(res, m))
    }
}

/// `{S_μ}` for a locally finite root system, constant on length classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    pub name: String,
    pub kind: RootKind,
    pub rank: usize,
    pub short: Progression,
    pub long: Progression,
    pub extra_long: Progression,
    pub s0: Progression,
}

impl RootDatum {
    /// The root system of the locally loop algebra of the given type, at `rank`.
    pub fn builtin(tag: LoopTag, rank: usize) -> Self {
        let z = Progression::Z;
        let (long, extra_long) = match tag {
            LoopTag::B2 | LoopTag::C2 => (Progression::EVEN, z),
            LoopTag::BC2 => (z, Progression::ODD),
            _ => (z, z),
        };
        RootDatum { name: tag.to_string(), kind: tag.root_kind(), rank, short: z, long, extra_long, s0: z }
    }

    pub fn s(&self, mu: &Weight) -> Result<Progression> {
        Ok(match root_length(self.kind, self.rank, mu)? {
            RootLengthClass::Short => self.short,
            RootLengthClass::Long => self.long,
            RootLengthClass::ExtraLong => self.extra_long,
        })
    }

    /// Fixtures that each break exactly the axiom they are named after.
    pub fn mutants(rank: usize) -> Vec<(RootDatum, &'static str)> {
        let mut bc = Self::builtin(LoopTag::BC2, rank);
        bc.extra_long = Progression::EVEN;
        bc.name = "BC2 with S_ex = 2Z".into();
        let mut b = Self::builtin(LoopTag::B2, rank);
        b.long = Progression::ODD;
        b.name = "B2 with S_long = 2Z+1".into();
        let mut c = Self::builtin(LoopTag::C1, rank);
        c.short = Progression::EVEN;
        c.name = "C1 with S_short = 2Z".into();
        let mut a = Self::builtin(LoopTag::A1, rank);
        a.s0 = Progression::EVEN;
        a.name = "A1 with S_0 = 2Z".into();
        let mut all = Self::builtin(LoopTag::A1, rank);
        all.short = Progression::EVEN;
        all.long = Progression::EVEN;
        all.s0 = Progression::EVEN;
        all.name = "A1 with every S = 2Z".into();
        vec![(bc, "S3"), (b, "S2"), (c, "S1"), (a, "S4"), (all, "S0")]
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "kind": format!("{:?}", self.kind),
            "rank": self.rank,
            "short": self.short.to_string(),
            "long": self.long.to_string(),
            "extraLong": self.extra_long.to_string(),
            "S0": self.s0.to_string(),
        })
    }
}

/// Axioms (S0)–(S3) and the identity `S_0 = S_μ + S_μ` for short `μ`.
pub fn check_root_datum(rd: &RootDatum) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("rootdatum", rd.to_json());
    let rs = roots(rd.kind, rd.rank);
    let sets: Vec<(Weight, Progression)> = rs.iter().map(|m| Ok((m.clone(), rd.s(m)?))).collect::<Result<_>>()?;

    let gen = Progression::generated(&sets.iter().map(|s| s.1).collect::<Vec<_>>());
    report.push(Check::from_witness(
        "S0",
        json!({"generated": format!("{gen}Z")}),
        (gen != 1).then(|| json!({"generated": format!("{gen}Z")})),
    ));

    let mut witness = None;
    let mut pairs = 0;
    'outer: for (mu, smu) in &sets {
        for (nu, snu) in &sets {
            pairs += 1;
            let k = nu.cartan_integer(mu);
            let target = nu.sub(&mu.scale(k));
            let lhs = snu.minus_multiple(k, smu);
            let rhs = rd.s(&target)?;
            if !lhs.is_subset(&rhs) {
                witness = Some(json!({
                    "mu": mu.to_string(), "nu": nu.to_string(), "cartan": k,
                    "lhs": lhs.to_string(), "target": target.to_string(), "S_target": rhs.to_string(),
                }));
                break 'outer;
            }
        }
    }
    report.push(Check::from_witness("S1", json!({"pairs": pairs}), witness));

    let witness = sets
        .iter()
        .find(|(m, s)| is_reduced_root(rd.kind, rd.rank, m) && !s.contains(0))
        .map(|(m, s)| json!({"mu": m.to_string(), "S_mu": s.to_string()}));
    report.push(Check::from_witness("S2", json!({}), witness));

    let mut checked = 0;
    let witness = sets.iter().find_map(|(m, s)| {
        let double = m.scale(2);
        let s2 = sets.iter().find(|(w, _)| *w == double)?.1;
        checked += 1;
        s2.intersects(&s.doubled()).then(|| {
            json!({"mu": m.to_string(), "S_2mu": s2.to_string(), "2S_mu": s.doubled().to_string()})
        })
    });
    report.push(Check::from_witness("S3", json!({"doubled_roots": checked}), witness));

    let witness = sets
        .iter()
        .filter(|(m, _)| root_length(rd.kind, rd.rank, m).ok() == Some(RootLengthClass::Short))
        .find(|(_, s)| s.sum(s) != rd.s0)
        .map(|(m, s)| json!({"mu": m.to_string(), "S_mu+S_mu": s.sum(s).to_string(), "S0": rd.s0.to_string()}));
    report.push(Check::from_witness("S4", json!({"S0": rd.s0.to_string()}), witness));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn progression_arithmetic() {
        let (z, e, o) = (Progression::Z, Progression::EVEN, Progression::ODD);
        assert_eq!(z.minus_multiple(2, &o), z);
        assert_eq!(o.minus_multiple(2, &o), o);
        assert_eq!(e.minus_multiple(1, &o), o);
        assert_eq!(o.sum(&o), e);
        assert_eq!(o.doubled(), Progression::new(2, 4));
        assert!(!o.doubled().intersects(&o));
        assert!(e.doubled().intersects(&e));
        assert!(e.is_subset(&z) && !z.is_subset(&e));
        for s in ["Z", "2Z", "2Z+1", "4Z+2"] {
            assert_eq!(s.parse::<Progression>().unwrap().to_string(), s);
        }
        assert!("Q".parse::<Progression>().is_err());
    }

    #[test]
    fn builtins_pass() {
        for tag in LoopTag::ALL {
            let r = check_root_datum(&RootDatum::builtin(tag, 3)).unwrap();
            assert!(r.passed(), "{tag}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn mutants_fail_their_axiom() {
        for (rd, axiom) in RootDatum::mutants(3) {
            let r = check_root_datum(&rd).unwrap();
            assert!(!r.check(axiom).unwrap().passed, "{} should fail {axiom}", rd.name);
            assert!(r.check(axiom).unwrap().witness.is_some());
        }
    }
}
