//! Line-based relation format for importing and exporting encoded problems.
//!
//! One relation per line: `pos <lhs> < <rhs>` or `neg <lhs> < <rhs>`, each
//! side a single constant name or a `+`-joined merge of constant names.
//! Blank lines and `#` comments are skipped. Unseen names are registered as
//! constants on import, so a file fully defines a problem.

use crate::algebra::{AlgebraState, ConstantId, ElementRef, Relation, Sign};
use crate::error::{Error, Result};

fn side_to_text(state: &AlgebraState, x: ElementRef) -> String {
    match x {
        ElementRef::Constant(c) => state.constant_name(c).to_string(),
        ElementRef::Term(t) => {
            let names: Vec<&str> = state
                .term_components(t)
                .iter()
                .map(|i| state.constant_name(ConstantId(i as u32)))
                .collect();
            names.join("+")
        }
        _ => unreachable!("relations hold between constants and terms"),
    }
}

pub fn export_relations(state: &AlgebraState, relations: &[Relation]) -> String {
    let mut out = String::new();
    for rel in relations {
        out.push_str(if rel.is_positive() { "pos " } else { "neg " });
        out.push_str(&side_to_text(state, rel.lhs));
        out.push_str(" < ");
        out.push_str(&side_to_text(state, rel.rhs));
        out.push('\n');
    }
    out
}

fn parse_side(state: &mut AlgebraState, text: &str) -> Result<ElementRef> {
    let names: Vec<&str> = text.split('+').map(str::trim).collect();
    let mut ids = Vec::with_capacity(names.len());
    for name in names {
        if name.is_empty() {
            return Err(Error::UnknownConstant(text.to_string()));
        }
        let id = match state.constant_id(name) {
            Ok(id) => id,
            Err(_) => {
                let ElementRef::Constant(id) = state.add_constant(name)? else {
                    unreachable!()
                };
                id
            }
        };
        ids.push(id);
    }
    if ids.len() == 1 {
        Ok(ElementRef::Constant(ids[0]))
    } else {
        state.define_term(&ids)
    }
}

pub fn import_relations(state: &mut AlgebraState, text: &str) -> Result<Vec<Relation>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (sign, rest) = if let Some(rest) = line.strip_prefix("pos ") {
            (Sign::Positive, rest)
        } else if let Some(rest) = line.strip_prefix("neg ") {
            (Sign::Negative, rest)
        } else {
            return Err(Error::UnknownConstant(format!(
                "line {}: expected `pos` or `neg`",
                lineno + 1
            )));
        };
        let Some((lhs_text, rhs_text)) = rest.split_once(" < ") else {
            return Err(Error::UnknownConstant(format!(
                "line {}: expected `<lhs> < <rhs>`",
                lineno + 1
            )));
        };
        let lhs = parse_side(state, lhs_text)?;
        let rhs = parse_side(state, rhs_text)?;
        out.push(Relation { sign, lhs, rhs });
    }
    Ok(out)
}
