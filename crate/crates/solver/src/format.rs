//! Canonical line-oriented text form of every problem class.
//!
//! The grammar is documented in `docs/problem-format.md`. Writing is
//! deterministic (numbers use the shortest round-trip representation), so
//! `write(parse(text)) == text` whenever `text` was produced by [`write`].

use std::fmt::Write as _;

use crate::error::{Result, SolverError};
use crate::problem::{
    AffineExpr, ConicProgram, LinearProgram, MipLimits, MixedIntegerProgram, Row, SecondOrderCone,
    Sense,
};

const HEADER: &str = "dpgrid-problem 1";

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Lp(LinearProgram),
    Socp(ConicProgram),
    Milp(MixedIntegerProgram),
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Lp(_) => "lp",
            Problem::Socp(_) => "socp",
            Problem::Milp(_) => "milp",
        }
    }

    pub fn linear_part(&self) -> &LinearProgram {
        match self {
            Problem::Lp(lp) => lp,
            Problem::Socp(cp) => &cp.lp,
            Problem::Milp(mip) => &mip.lp,
        }
    }
}

fn num(v: f64) -> String {
    if v == 0.0 {
        // Normalize -0.
        "0".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

fn write_terms(out: &mut String, terms: &[(usize, f64)]) {
    for &(j, a) in terms {
        let _ = write!(out, " {j}:{}", num(a));
    }
}

fn write_expr(out: &mut String, e: &AffineExpr) {
    out.push_str(&num(e.constant));
    write_terms(out, &e.terms);
}

fn write_linear(out: &mut String, lp: &LinearProgram) {
    let _ = writeln!(out, "vars {}", lp.num_vars());
    let _ = writeln!(out, "offset {}", num(lp.objective_offset));
    for j in 0..lp.num_vars() {
        let _ = writeln!(out, "var {} {} {}", num(lp.objective[j]), num(lp.lower[j]), num(lp.upper[j]));
    }
    for row in &lp.rows {
        let _ = write!(out, "row {} {}", row.sense.symbol(), num(row.rhs));
        write_terms(out, &row.coeffs);
        out.push('\n');
    }
}

/// Serializes a problem in canonical form.
pub fn write(problem: &Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "kind {}", problem.kind());
    write_linear(&mut out, problem.linear_part());
    match problem {
        Problem::Lp(_) => {}
        Problem::Socp(cp) => {
            for cone in &cp.cones {
                out.push_str("cone ");
                write_expr(&mut out, &cone.head);
                for e in &cone.tail {
                    out.push_str(" ; ");
                    write_expr(&mut out, e);
                }
                out.push('\n');
            }
        }
        Problem::Milp(mip) => {
            out.push_str("binary");
            for &j in &mip.binaries {
                let _ = write!(out, " {j}");
            }
            out.push('\n');
            let l = &mip.limits;
            let _ = writeln!(
                out,
                "limits {} {} {}",
                num(l.relative_gap),
                num(l.absolute_gap),
                l.max_nodes
            );
            if let Some(start) = &mip.start {
                out.push_str("start");
                for &v in start {
                    let _ = write!(out, " {}", num(v));
                }
                out.push('\n');
            }
        }
    }
    out.push_str("end\n");
    out
}

struct Cursor<'a> {
    line: usize,
    toks: std::str::SplitWhitespace<'a>,
}

impl<'a> Cursor<'a> {
    fn err(&self, msg: impl Into<String>) -> SolverError {
        SolverError::Parse {
            line: self.line,
            message: msg.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        self.toks.next().ok_or_else(|| self.err(format!("missing {what}")))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let t = self.next(what)?;
        parse_f64(t).ok_or_else(|| self.err(format!("invalid {what} `{t}`")))
    }

    fn usize(&mut self, what: &str) -> Result<usize> {
        let t = self.next(what)?;
        t.parse().map_err(|_| self.err(format!("invalid {what} `{t}`")))
    }

    fn done(&mut self) -> Result<()> {
        match self.toks.next() {
            Some(t) => Err(self.err(format!("unexpected token `{t}`"))),
            None => Ok(()),
        }
    }
}

fn parse_f64(t: &str) -> Option<f64> {
    match t {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => t.parse().ok().filter(|v: &f64| !v.is_nan()),
    }
}

fn parse_term(c: &Cursor, t: &str) -> Result<(usize, f64)> {
    let (j, a) = t
        .split_once(':')
        .ok_or_else(|| c.err(format!("expected `index:coefficient`, found `{t}`")))?;
    let j = j.parse().map_err(|_| c.err(format!("invalid index `{j}`")))?;
    let a = parse_f64(a).ok_or_else(|| c.err(format!("invalid coefficient `{a}`")))?;
    Ok((j, a))
}

fn parse_expr(c: &Cursor, text: &str) -> Result<AffineExpr> {
    let mut it = text.split_whitespace();
    let k = it.next().ok_or_else(|| c.err("empty cone expression"))?;
    let constant = parse_f64(k).ok_or_else(|| c.err(format!("invalid constant `{k}`")))?;
    let terms = it.map(|t| parse_term(c, t)).collect::<Result<Vec<_>>>()?;
    Ok(AffineExpr { terms, constant })
}

/// Parses the canonical form. Blank lines and `#` comments are ignored.
pub fn parse(text: &str) -> Result<Problem> {
    let mut lp = LinearProgram::new();
    let mut cones = Vec::new();
    let mut binaries = Vec::new();
    let mut limits = MipLimits::default();
    let mut start = None;
    let mut kind = None;
    let mut declared_vars = None;
    let mut seen_header = false;
    let mut ended = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut c = Cursor {
            line: idx + 1,
            toks: line.split_whitespace(),
        };
        if ended {
            return Err(c.err("content after `end`"));
        }
        if !seen_header {
            if line != HEADER {
                return Err(c.err(format!("expected header `{HEADER}`")));
            }
            seen_header = true;
            continue;
        }
        let key = c.next("keyword")?;
        match key {
            "kind" => {
                let k = c.next("kind")?;
                if !matches!(k, "lp" | "socp" | "milp") {
                    return Err(c.err(format!("unknown kind `{k}`")));
                }
                kind = Some(k.to_string());
                c.done()?;
            }
            "vars" => {
                declared_vars = Some(c.usize("variable count")?);
                c.done()?;
            }
            "offset" => {
                lp.objective_offset = c.f64("offset")?;
                c.done()?;
            }
            "var" => {
                let cost = c.f64("cost")?;
                let lo = c.f64("lower bound")?;
                let hi = c.f64("upper bound")?;
                c.done()?;
                lp.add_var(cost, lo, hi);
            }
            "row" => {
                let sense = match c.next("sense")? {
                    "<=" => Sense::Le,
                    "=" => Sense::Eq,
                    ">=" => Sense::Ge,
                    s => return Err(c.err(format!("unknown sense `{s}`"))),
                };
                let rhs = c.f64("rhs")?;
                let mut coeffs = Vec::new();
                while let Some(t) = c.toks.next() {
                    coeffs.push(parse_term(&c, t)?);
                }
                lp.rows.push(Row { coeffs, sense, rhs });
            }
            "cone" => {
                let rest = line["cone".len()..].trim();
                let mut parts = rest.split(';');
                let head = parse_expr(&c, parts.next().unwrap_or(""))?;
                let tail = parts.map(|p| parse_expr(&c, p)).collect::<Result<Vec<_>>>()?;
                cones.push(SecondOrderCone { head, tail });
            }
            "binary" => {
                for t in c.toks.by_ref() {
                    binaries.push(t.parse().map_err(|_| SolverError::Parse {
                        line: idx + 1,
                        message: format!("invalid binary index `{t}`"),
                    })?);
                }
            }
            "limits" => {
                limits.relative_gap = c.f64("relative gap")?;
                limits.absolute_gap = c.f64("absolute gap")?;
                limits.max_nodes = c.usize("node limit")?;
                c.done()?;
            }
            "start" => {
                let mut v = Vec::new();
                while let Some(t) = c.toks.next() {
                    v.push(parse_f64(t).ok_or_else(|| c.err(format!("invalid start value `{t}`")))?);
                }
                start = Some(v);
            }
            "end" => {
                c.done()?;
                ended = true;
            }
            other => return Err(c.err(format!("unknown keyword `{other}`"))),
        }
    }
    let last = text.lines().count();
    let fail = |m: &str| SolverError::Parse {
        line: last,
        message: m.to_string(),
    };
    if !seen_header {
        return Err(fail("missing header"));
    }
    if !ended {
        return Err(fail("missing `end`"));
    }
    if declared_vars != Some(lp.num_vars()) {
        return Err(fail("`vars` does not match the number of `var` lines"));
    }
    let problem = match kind.as_deref() {
        Some("lp") if cones.is_empty() && binaries.is_empty() && start.is_none() => Problem::Lp(lp),
        Some("socp") if binaries.is_empty() && start.is_none() => {
            let cp = ConicProgram { lp, cones };
            cp.validate()?;
            return Ok(Problem::Socp(cp));
        }
        Some("milp") if cones.is_empty() => {
            let mip = MixedIntegerProgram {
                lp,
                binaries,
                limits,
                start,
            };
            mip.validate()?;
            return Ok(Problem::Milp(mip));
        }
        Some(k) => return Err(fail(&format!("sections not allowed for kind `{k}`"))),
        None => return Err(fail("missing `kind`")),
    };
    if let Problem::Lp(lp) = &problem {
        lp.validate()?;
    }
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_round_trip_is_canonical() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(1.5, 0.0, f64::INFINITY);
        let y = lp.add_var(-2.0, f64::NEG_INFINITY, 4.0);
        lp.add_row(vec![(x, 1.0), (y, 0.1)], Sense::Ge, -3.0);
        lp.objective_offset = 1e-12;
        let text = write(&Problem::Lp(lp.clone()));
        let back = parse(&text).unwrap();
        assert_eq!(back, Problem::Lp(lp));
        assert_eq!(write(&back), text);
    }

    #[test]
    fn socp_and_milp_round_trip() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY);
        let t = lp.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        let mut cp = ConicProgram::new(lp);
        cp.add_cone(
            AffineExpr::var(t),
            vec![AffineExpr::new(vec![(x, 1.0)], -1.0), AffineExpr::new(vec![(x, 1.0)], 1.0)],
        );
        let p = Problem::Socp(cp);
        assert_eq!(parse(&write(&p)).unwrap(), p);

        let mut mip = MixedIntegerProgram::new(LinearProgram::new());
        let b = mip.add_binary(2.0);
        mip.lp.add_row(vec![(b, 1.0)], Sense::Ge, 0.5);
        mip.start = Some(vec![1.0]);
        mip.limits.max_nodes = 10;
        let p = Problem::Milp(mip);
        assert_eq!(parse(&write(&p)).unwrap(), p);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "dpgrid-problem 1\nkind lp\nvars 1\nvar 1 0 x\nend\n";
        match parse(text) {
            Err(SolverError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let text = "dpgrid-problem 1\nkind lp\nvars 2\nvar 1 0 1\nend\n";
        assert!(parse(text).is_err());
        let text = "dpgrid-problem 1\nkind lp\nvars 1\nvar 1 0 1\nrow <= 1 5:1\nend\n";
        assert!(matches!(parse(text), Err(SolverError::Malformed(_))));
    }
}
