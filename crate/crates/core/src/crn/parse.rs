//! Line-oriented model format.
//!
//! ```text
//! # comment
//! species P, RNA, Doff, Don
//! unit h
//! init P=10, RNA=4, Doff=1
//! r act: Doff -> Don @ 0.05
//! r prod: Don -> Don + RNA @ 10
//! r deg: RNA -> 0 @ 1
//! r dim: 2 M -> D @ 0.083
//! ```
//!
//! Statements are separated by newlines or `;`. Unlisted species start at 0.

use crate::error::{Error, Result};
use crate::magnitude::parse_decimal;

use super::{Crn, Reaction, Species};

struct Statement<'a> {
    line: usize,
    text: &'a str,
}

fn statements(text: &str) -> Vec<Statement<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        for part in body.split(';') {
            let part = part.trim();
            if !part.is_empty() {
                out.push(Statement { line: i + 1, text: part });
            }
        }
    }
    out
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

fn keyword<'a>(text: &'a str, kw: &str) -> Option<&'a str> {
    let rest = text.strip_prefix(kw)?;
    if rest.is_empty() || rest.starts_with(char::is_whitespace) {
        Some(rest.trim())
    } else {
        None
    }
}

/// Parses a model document.
pub fn parse_crn(text: &str) -> Result<Crn> {
    let stmts = statements(text);

    let mut species: Vec<Species> = Vec::new();
    for st in &stmts {
        if let Some(list) = keyword(st.text, "species") {
            for name in list.split(',').map(str::trim) {
                if !is_identifier(name) {
                    return Err(err(st.line, format!("invalid species name `{name}`")));
                }
                if species.iter().any(|s| s.name == name) {
                    return Err(err(st.line, format!("duplicate species `{name}`")));
                }
                species.push(Species { name: name.to_string(), index: species.len() });
            }
        }
    }
    let lookup = |line: usize, name: &str| -> Result<usize> {
        species.iter().position(|s| s.name == name).ok_or_else(|| err(line, format!("undeclared species `{name}`")))
    };

    let n = species.len();
    let mut initial = vec![0u64; n];
    let mut time_unit = None;
    let mut reactions: Vec<Reaction> = Vec::new();

    for st in &stmts {
        if keyword(st.text, "species").is_some() {
            continue;
        } else if let Some(list) = keyword(st.text, "init") {
            for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (name, value) =
                    item.split_once('=').ok_or_else(|| err(st.line, format!("expected `name=count`, got `{item}`")))?;
                let idx = lookup(st.line, name.trim())?;
                initial[idx] =
                    value.trim().parse().map_err(|_| err(st.line, format!("invalid population `{}`", value.trim())))?;
            }
        } else if let Some(unit) = keyword(st.text, "unit") {
            if unit.is_empty() {
                return Err(err(st.line, "missing time unit"));
            }
            time_unit = Some(unit.to_string());
        } else if let Some(body) = keyword(st.text, "r") {
            let reaction = parse_reaction(st.line, body, n, &lookup)?;
            if reactions.iter().any(|r| r.label == reaction.label) {
                return Err(err(st.line, format!("duplicate reaction label `{}`", reaction.label)));
            }
            reactions.push(reaction);
        } else {
            return Err(err(st.line, format!("unrecognised statement `{}`", st.text)));
        }
    }

    if n == 0 {
        return Err(err(1, "no species declared"));
    }
    let crn = Crn { species, reactions, initial, time_unit };
    crn.check()?;
    Ok(crn)
}

fn parse_reaction(
    line: usize,
    body: &str,
    n: usize,
    lookup: &dyn Fn(usize, &str) -> Result<usize>,
) -> Result<Reaction> {
    let (label, rest) = body.split_once(':').ok_or_else(|| err(line, "expected `label: lhs -> rhs @ rate`"))?;
    let label = label.trim();
    if !is_identifier(label) {
        return Err(err(line, format!("invalid reaction label `{label}`")));
    }
    let (arrow, rate) = rest.rsplit_once('@').ok_or_else(|| err(line, "missing `@ rate`"))?;
    let (lhs, rhs) = arrow.split_once("->").ok_or_else(|| err(line, "missing `->`"))?;
    if rhs.contains("->") {
        return Err(err(line, "more than one `->`"));
    }
    let rate_text = rate.trim();
    let rate = parse_decimal(rate_text).ok_or_else(|| err(line, format!("invalid rate `{rate_text}`")))?;
    if rate <= num::zero() {
        return Err(err(line, format!("rate must be positive, got `{rate_text}`")));
    }
    let reactants = parse_complex(line, lhs, n, lookup)?;
    let products = parse_complex(line, rhs, n, lookup)?;
    Reaction::new(label, reactants, products, rate).map_err(|e| err(line, e.to_string()))
}

fn parse_complex(line: usize, text: &str, n: usize, lookup: &dyn Fn(usize, &str) -> Result<usize>) -> Result<Vec<u32>> {
    let mut v = vec![0u32; n];
    let text = text.trim();
    if text == "0" || text == "∅" {
        return Ok(v);
    }
    if text.is_empty() {
        return Err(err(line, "empty complex (write `0`)"));
    }
    for term in text.split('+').map(str::trim) {
        let mut parts = term.split_whitespace();
        let (coef, name) = match (parts.next(), parts.next(), parts.next()) {
            (Some(name), None, None) => match split_glued(name) {
                Some((c, rest)) => (c, rest),
                None => (1, name),
            },
            (Some(c), Some(name), None) => {
                let c: u32 = c.parse().map_err(|_| err(line, format!("malformed term `{term}`")))?;
                (c, name)
            }
            _ => return Err(err(line, format!("malformed term `{term}`"))),
        };
        if !is_identifier(name) {
            return Err(err(line, format!("malformed term `{term}`")));
        }
        let idx = lookup(line, name)?;
        v[idx] += coef;
    }
    Ok(v)
}

/// `2M` style terms without a space.
fn split_glued(term: &str) -> Option<(u32, &str)> {
    let digits = term.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits == 0 || digits == term.len() {
        return None;
    }
    Some((term[..digits].parse().ok()?, &term[digits..]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnitude::{parse_decimal, Exact};

    #[test]
    fn degradation_one_liner() {
        let crn = parse_crn("species L; init L=13; r d: L -> 0 @ 1e-4").unwrap();
        assert_eq!(crn.num_species(), 1);
        assert_eq!(crn.initial, vec![13]);
        assert_eq!(crn.reactions[0].change, vec![-1]);
        assert_eq!(crn.reactions[0].rate, parse_decimal("1e-4").unwrap());
    }

    #[test]
    fn stoichiometry_of_bimolecular_reaction() {
        let crn = parse_crn("species A, B, C\nr t1: A + B -> 2 C @ 0.5").unwrap();
        let r = &crn.reactions[0];
        assert_eq!(r.reactants, vec![1, 1, 0]);
        assert_eq!(r.products, vec![0, 0, 2]);
        assert_eq!(r.change, vec![-1, -1, 2]);
        let glued = parse_crn("species A, C\nr t: 2A -> C @ 1").unwrap();
        assert_eq!(glued.reactions[0].reactants, vec![2, 0]);
    }

    #[test]
    fn undeclared_species_is_named() {
        let e = parse_crn("species A\nr bad: A -> Z @ 1").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("`Z`"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn error_cases_carry_line_numbers() {
        let cases = [
            ("species A\nr x: A -> 0 @ 0", 2, "positive"),
            ("species A\nr x: A -> 0 @ -1", 2, "positive"),
            ("species A, A", 1, "duplicate"),
            ("species A\n\nr x: A => 0 @ 1", 3, "->"),
            ("species A\nr x: A -> 0", 2, "@"),
            ("species A\nr x: 2 3 A -> 0 @ 1", 2, "malformed"),
            ("species A\nfoo bar", 2, "unrecognised"),
            ("species A\ninit A=-1", 2, "population"),
        ];
        for (text, line, fragment) in cases {
            match parse_crn(text) {
                Err(Error::Parse { line: l, message }) => {
                    assert_eq!(l, line, "{text}");
                    assert!(message.contains(fragment), "{text}: {message}");
                }
                other => panic!("{text}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn comments_units_and_dotted_names() {
        let text = "# Goutsias fragment\nspecies DNA, D, DNA.D # trailing\nunit s\ninit DNA=1, D=6\nr bind: DNA + D -> DNA.D @ 0.002\n";
        let crn = parse_crn(text).unwrap();
        assert_eq!(crn.time_unit.as_deref(), Some("s"));
        assert_eq!(crn.initial, vec![1, 6, 0]);
        assert_eq!(crn.reactions[0].rate, Exact::new(1.into(), 500.into()));
    }

    #[test]
    fn printed_model_parses_back() {
        let text =
            "species A, B, C\nunit h\ninit A=3\nr t1: A + B -> 2 C @ 0.5\nr src: 0 -> A @ 7e-6\nr dim: 2 A -> B @ 1.99";
        let crn = parse_crn(text).unwrap();
        let again = parse_crn(&crn.to_string()).unwrap();
        assert_eq!(crn, again);
    }

    proptest::proptest! {
        #[test]
        fn print_parse_round_trip(
            reactions in proptest::collection::vec(
                (proptest::collection::vec(0u32..3, 3), proptest::collection::vec(0u32..3, 3), 1u64..100_000, 0i32..8),
                1..6,
            ),
            init in proptest::collection::vec(0u64..50, 3),
        ) {
            let mut text = String::from("species X, Y, Z_1\n");
            text.push_str(&format!("init X={}, Y={}, Z_1={}\n", init[0], init[1], init[2]));
            let names = ["X", "Y", "Z_1"];
            let complex = |v: &[u32]| {
                let t: Vec<String> = v.iter().zip(names).filter(|(c, _)| **c > 0).map(|(c, n)| format!("{c} {n}")).collect();
                if t.is_empty() { "0".to_string() } else { t.join(" + ") }
            };
            for (i, (r, p, mant, exp)) in reactions.iter().enumerate() {
                text.push_str(&format!("r r{i}: {} -> {} @ {mant}e-{exp}\n", complex(r), complex(p)));
            }
            let crn = parse_crn(&text).unwrap();
            proptest::prop_assert_eq!(parse_crn(&crn.to_string()).unwrap(), crn);
        }
    }
}
