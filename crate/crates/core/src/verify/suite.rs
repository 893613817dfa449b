//! Named suites, as driven from the command line.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde_json::json;

use crate::error::{Error, Result};
use crate::forms::FormSpec;
use crate::loops::{AlgebraOptions, LoopAlgebra, LoopType};

use super::center::check_center;
use super::formsuite::check_forms;
use super::generation::{generation_check, standard_generators};
use super::jacobi::check_jacobi;
use super::report::{Check, VerificationReport};
use super::rootdatum::{check_root_datum, RootDatum};
use super::torus::{check_lie_torus, inject_fault};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Torus,
    RootDatum,
    Forms,
    Jacobi,
    Center,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Center, Suite::Forms, Suite::Jacobi, Suite::RootDatum, Suite::Torus];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Torus => "torus",
            Suite::RootDatum => "rootdatum",
            Suite::Forms => "forms",
            Suite::Jacobi => "jacobi",
            Suite::Center => "center",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "torus" => Suite::Torus,
            "rootdatum" => Suite::RootDatum,
            "forms" => Suite::Forms,
            "jacobi" => Suite::Jacobi,
            "center" => Suite::Center,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub ty: LoopType,
    pub form: FormSpec,
    pub seed: u64,
    pub samples: usize,
    /// Corrupt one structure constant of the core before the torus and Jacobi checks.
    pub inject_fault: bool,
}

/// Runs one suite (or all of them, ordered by name) and returns its reports.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    if suite == Suite::All {
        let mut out = Vec::new();
        for s in Suite::EACH {
            out.extend(run_suite(s, cfg)?);
        }
        return Ok(out);
    }
    let ty = &cfg.ty;
    let build = |opts| LoopAlgebra::new(*ty, opts, cfg.form.clone());
    let timed = |f: &mut dyn FnMut() -> Result<VerificationReport>| -> Result<VerificationReport> {
        let start = Instant::now();
        let mut r = f()?;
        r.elapsed = Some(start.elapsed());
        Ok(r)
    };
    let core_table = |a: &LoopAlgebra| -> Result<_> {
        let mut t = a.structure_table()?;
        if cfg.inject_fault {
            inject_fault(a, &mut t);
        }
        Ok(t)
    };
    let mut out = Vec::new();
    match suite {
        Suite::Torus => {
            out.push(timed(&mut || {
                let a = build(AlgebraOptions::core())?;
                Ok(check_lie_torus(&a, &core_table(&a)?))
            })?);
            out.push(timed(&mut || {
                let a = build(AlgebraOptions::core())?;
                generation_check(&a, &standard_generators(&a))
            })?);
        }
        Suite::RootDatum => {
            // Cartan integers are enumerated over finite root lists: cap the rank at 4
            let rank = ty.rank.min(4);
            out.push(timed(&mut || check_root_datum(&RootDatum::builtin(ty.tag, rank)))?);
            out.push(timed(&mut || {
                // the mutant fixtures are fixed at rank 3, where every length class occurs
                let mut r = VerificationReport::new("rootdatum-mutants", json!({"rank": 3}));
                for (rd, axiom) in RootDatum::mutants(3) {
                    let got = check_root_datum(&rd)?;
                    let c = got.check(axiom).expect("axiom is checked");
                    let name = format!("{} fails {axiom}", rd.name);
                    if c.passed {
                        r.push(Check::fail(name, json!({}), json!({"reason": "mutant accepted", "datum": rd.to_json()})));
                    } else {
                        r.push(Check::pass(name, json!({"witness": c.witness})));
                    }
                }
                Ok(r)
            })?);
        }
        Suite::Forms => out.push(timed(&mut || check_forms(ty, &cfg.form, cfg.seed, cfg.samples))?),
        Suite::Jacobi => {
            out.push(timed(&mut || {
                let a = build(AlgebraOptions::core())?;
                Ok(check_jacobi(&a, &core_table(&a)?, "jacobi"))
            })?);
            out.push(timed(&mut || {
                let a = build(AlgebraOptions::extended())?;
                Ok(check_jacobi(&a, &a.structure_table()?, "jacobi-extended"))
            })?);
        }
        Suite::Center => out.push(timed(&mut || {
            check_center(
                &build(AlgebraOptions::core())?,
                &build(AlgebraOptions::extended())?,
                &build(AlgebraOptions::minimal_lala())?,
            )
        })?),
        Suite::All => unreachable!(),
    }
    Ok(out)
}
