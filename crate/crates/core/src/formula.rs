//! Model formula language.
//!
//! ```text
//! formula := ident "~" rhs
//! rhs     := ["-1" | term] { ("+" | "-") term }
//! term    := atom { (":" | "*") atom }
//! atom    := ident | "1"
//! ident   := [A-Za-z_][A-Za-z0-9_.]*
//! ```
//!
//! `:` binds tighter than `*`, and `A*B` expands to `A + B + A:B`. A term made
//! only of factors goes to the intercept sub-model; a term with exactly one
//! covariate goes to that covariate's sub-model, its factors naming the
//! effect (`x` alone is the `0…0` effect of the `x` sub-model). The intercept
//! is implied unless removed with `-1`; `-term` removes a term added earlier.

use std::fmt;

use thiserror::Error;

use crate::design::{EffectId, EffectSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} (at offset {offset})")]
pub struct FormulaError {
    pub offset: usize,
    pub message: String,
}

impl FormulaError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaWarning {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for FormulaWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at offset {})", self.message, self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    One,
    Tilde,
    Plus,
    Minus,
    Colon,
    Star,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => Tok::Tilde,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b':' => Tok::Colon,
            b'*' => Tok::Star,
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if &text[start..i] != "1" {
                    return Err(FormulaError::new(
                        start,
                        format!("unexpected number `{}`; only `1` is allowed", &text[start..i]),
                    ));
                }
                out.push((Tok::One, start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'.')
                {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(FormulaError::new(i, format!("unexpected character `{ch}`")));
            }
        };
        out.push((tok, i));
        i += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Name(String),
    One,
}

/// One signed term as written, before `*` expansion or name resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceTerm {
    pub negated: bool,
    pub offset: usize,
    /// `*`-separated groups, each a `:`-product of atoms with their offsets.
    pub groups: Vec<Vec<(Atom, usize)>>,
}

/// Syntactic parse of a formula with source offsets for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaSource {
    pub text: String,
    pub response: String,
    pub terms: Vec<SourceTerm>,
}

impl FormulaSource {
    pub fn parse(text: &str) -> Result<Self, FormulaError> {
        let toks = lex(text)?;
        let mut pos = 0;
        let end = text.len();
        let at = |p: usize| toks.get(p).map_or(end, |t| t.1);

        let response = match toks.first() {
            Some((Tok::Ident(name), _)) => name.clone(),
            _ => return Err(FormulaError::new(at(0), "expected response name")),
        };
        pos += 1;
        if !matches!(toks.get(pos), Some((Tok::Tilde, _))) {
            return Err(FormulaError::new(at(pos), "expected `~` after response"));
        }
        pos += 1;

        let mut terms = Vec::new();
        let mut first = true;
        while pos < toks.len() || first {
            let negated = match toks.get(pos) {
                Some((Tok::Plus, _)) if !first => {
                    pos += 1;
                    false
                }
                Some((Tok::Minus, _)) => {
                    pos += 1;
                    true
                }
                _ if first => false,
                _ => return Err(FormulaError::new(at(pos), "expected `+` or `-`")),
            };
            first = false;
            let offset = at(pos);
            let mut groups = vec![Vec::new()];
            loop {
                let atom = match toks.get(pos) {
                    Some((Tok::Ident(name), _)) => Atom::Name(name.clone()),
                    Some((Tok::One, _)) => Atom::One,
                    _ => return Err(FormulaError::new(at(pos), "expected a term")),
                };
                groups.last_mut().expect("non-empty").push((atom, at(pos)));
                pos += 1;
                match toks.get(pos) {
                    Some((Tok::Colon, _)) => pos += 1,
                    Some((Tok::Star, _)) => {
                        pos += 1;
                        groups.push(Vec::new());
                    }
                    _ => break,
                }
            }
            terms.push(SourceTerm {
                negated,
                offset,
                groups,
            });
        }
        Ok(Self {
            text: text.to_string(),
            response,
            terms,
        })
    }
}

/// Which sub-model a term belongs to: `0` is the intercept sub-model,
/// `i >= 1` the sub-model of the `i`-th covariate of the model.
pub type Submodel = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub submodel: Submodel,
    pub effect: EffectId,
}

/// Parsed model: per-sub-model effect sets plus the global term order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    response: String,
    factor_names: Vec<String>,
    covariate_names: Vec<String>,
    terms: Vec<Term>,
}

impl ModelSpec {
    /// Build directly from sub-model sets. Terms are ordered intercept
    /// sub-model first, then each covariate sub-model.
    pub fn from_submodels(
        response: impl Into<String>,
        factor_names: Vec<String>,
        intercept: &EffectSet,
        covariates: Vec<(String, EffectSet)>,
    ) -> Result<Self, FormulaError> {
        let f = factor_names.len();
        let mut terms = Vec::new();
        for j in intercept {
            terms.push(Term {
                submodel: 0,
                effect: j.clone(),
            });
        }
        let mut names = Vec::new();
        for (i, (name, set)) in covariates.into_iter().enumerate() {
            if set.is_empty() {
                return Err(FormulaError::new(0, format!("sub-model for `{name}` is empty")));
            }
            if names.contains(&name) || factor_names.contains(&name) {
                return Err(FormulaError::new(0, format!("duplicate name `{name}`")));
            }
            names.push(name);
            for j in &set {
                terms.push(Term {
                    submodel: i + 1,
                    effect: j.clone(),
                });
            }
        }
        if terms.is_empty() {
            return Err(FormulaError::new(0, "empty model"));
        }
        if terms.iter().any(|t| t.effect.len() != f) {
            return Err(FormulaError::new(0, "effect tuple length differs from factor count"));
        }
        Ok(Self {
            response: response.into(),
            factor_names,
            covariate_names: names,
            terms,
        })
    }

    pub fn response(&self) -> &str {
        &self.response
    }

    pub fn factor_names(&self) -> &[String] {
        &self.factor_names
    }

    /// Covariates used by the model, in sub-model order.
    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn submodel_count(&self) -> usize {
        1 + self.covariate_names.len()
    }

    pub fn submodel(&self, i: Submodel) -> EffectSet {
        self.terms
            .iter()
            .filter(|t| t.submodel == i)
            .map(|t| t.effect.clone())
            .collect()
    }

    pub fn intercept_submodel(&self) -> EffectSet {
        self.submodel(0)
    }

    pub fn covariate_submodels(&self) -> Vec<(String, EffectSet)> {
        self.covariate_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), self.submodel(i + 1)))
            .collect()
    }

    pub fn has_intercept(&self) -> bool {
        self.terms
            .iter()
            .any(|t| t.submodel == 0 && t.effect.is_intercept())
    }

    /// Display name of a term, e.g. `A:B`, `x1`, `A:x1`, `(Intercept)`.
    pub fn term_label(&self, term: &Term) -> String {
        if term.submodel == 0 {
            return term.effect.label(&self.factor_names);
        }
        let cov = &self.covariate_names[term.submodel - 1];
        if term.effect.is_intercept() {
            cov.clone()
        } else {
            format!("{}:{cov}", term.effect.label(&self.factor_names))
        }
    }

    fn term_source(&self, term: &Term) -> String {
        if term.submodel == 0 && term.effect.is_intercept() {
            "1".to_string()
        } else {
            self.term_label(term)
        }
    }

    /// Canonical text that parses back to an identical spec.
    pub fn render(&self) -> String {
        let implicit = matches!(self.terms.first(),
            Some(t) if t.submodel == 0 && t.effect.is_intercept());
        let mut parts = Vec::new();
        if implicit {
            parts.extend(self.terms[1..].iter().map(|t| self.term_source(t)));
            if parts.is_empty() {
                parts.push("1".to_string());
            }
        } else {
            parts.push("-1".to_string());
            parts.extend(self.terms.iter().map(|t| self.term_source(t)));
        }
        format!("{} ~ {}", self.response, parts.join(" + "))
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Parse a formula against the declared factor and covariate names.
pub fn parse(
    text: &str,
    known_factors: &[String],
    known_covariates: &[String],
) -> Result<ModelSpec, FormulaError> {
    parse_with_warnings(text, known_factors, known_covariates).map(|(s, _)| s)
}

/// Expand `*` groups into all non-empty group subsets: by size, then position.
fn expand(groups: &[Vec<(Atom, usize)>]) -> Vec<Vec<(Atom, usize)>> {
    let g = groups.len();
    let mut masks: Vec<usize> = (1..1usize << g).collect();
    masks.sort_by_key(|&m| {
        let bits: Vec<usize> = (0..g).filter(|k| m >> k & 1 == 1).collect();
        (bits.len(), bits)
    });
    masks
        .into_iter()
        .map(|m| {
            (0..g)
                .filter(|k| m >> k & 1 == 1)
                .flat_map(|k| groups[k].iter().cloned())
                .collect()
        })
        .collect()
}

pub fn parse_with_warnings(
    text: &str,
    known_factors: &[String],
    known_covariates: &[String],
) -> Result<(ModelSpec, Vec<FormulaWarning>), FormulaError> {
    if let Some(c) = known_covariates.iter().find(|c| known_factors.contains(c)) {
        return Err(FormulaError::new(0, format!("`{c}` declared as both factor and covariate")));
    }
    let source = FormulaSource::parse(text)?;
    let f = known_factors.len();
    let mut warnings = Vec::new();
    // (covariate name or None, effect)
    let mut terms: Vec<(Option<String>, EffectId)> = vec![(None, EffectId::intercept(f))];

    for st in &source.terms {
        // `1` alone is the intercept; `1` inside a product is rejected.
        let resolved: Vec<(Option<String>, EffectId, usize)> =
            if st.groups.len() == 1 && st.groups[0].len() == 1 && st.groups[0][0].0 == Atom::One {
                vec![(None, EffectId::intercept(f), st.offset)]
            } else {
                expand(&st.groups)
                    .into_iter()
                    .map(|atoms| resolve_product(&atoms, known_factors, known_covariates, st.offset))
                    .collect::<Result<_, _>>()?
            };
        for (cov, effect, off) in resolved {
            let key = (cov, effect);
            if st.negated {
                terms.retain(|t| *t != key);
            } else if terms.contains(&key) {
                warnings.push(FormulaWarning {
                    offset: off,
                    message: "duplicate term ignored".to_string(),
                });
            } else {
                terms.push(key);
            }
        }
    }
    if terms.is_empty() {
        return Err(FormulaError::new(text.len(), "empty model"));
    }

    let mut covariate_names: Vec<String> = Vec::new();
    for (cov, _) in &terms {
        if let Some(c) = cov {
            if !covariate_names.contains(c) {
                covariate_names.push(c.clone());
            }
        }
    }
    let terms = terms
        .into_iter()
        .map(|(cov, effect)| Term {
            submodel: cov.map_or(0, |c| {
                1 + covariate_names.iter().position(|n| *n == c).expect("collected")
            }),
            effect,
        })
        .collect();
    Ok((
        ModelSpec {
            response: source.response,
            factor_names: known_factors.to_vec(),
            covariate_names,
            terms,
        },
        warnings,
    ))
}

fn resolve_product(
    atoms: &[(Atom, usize)],
    factors: &[String],
    covariates: &[String],
    term_offset: usize,
) -> Result<(Option<String>, EffectId, usize), FormulaError> {
    let mut bits = vec![false; factors.len()];
    let mut cov: Option<String> = None;
    for (atom, off) in atoms {
        let name = match atom {
            Atom::One => {
                return Err(FormulaError::new(*off, "`1` cannot appear inside a product term"))
            }
            Atom::Name(n) => n,
        };
        if let Some(k) = factors.iter().position(|f| f == name) {
            if bits[k] {
                return Err(FormulaError::new(*off, format!("factor `{name}` repeated in term")));
            }
            bits[k] = true;
        } else if covariates.contains(name) {
            if let Some(prev) = &cov {
                let msg = if prev == name {
                    format!("covariate `{name}` repeated in term")
                } else {
                    format!("term has two covariates (`{prev}` and `{name}`)")
                };
                return Err(FormulaError::new(*off, msg));
            }
            cov = Some(name.clone());
        } else {
            return Err(FormulaError::new(*off, format!("unknown identifier `{name}`")));
        }
    }
    Ok((cov, EffectId::new(bits), term_offset))
}
