use super::lex::{lex, Cursor, Tok};
use super::IoError;
use crate::choice::{ChoiceContext, MassFunction};
use crate::model::PossibilitySpace;
use crate::Rational;

/// Probability and credal set read from a context file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContextDocument {
    pub probability: Option<MassFunction<Rational>>,
    pub credal: Option<Vec<MassFunction<Rational>>>,
}

impl ContextDocument {
    /// Adds the parsed mass functions to `context`.
    pub fn apply(&self, mut context: ChoiceContext<Rational>) -> ChoiceContext<Rational> {
        if let Some(p) = &self.probability {
            context = context.with_probability(p.clone());
        }
        if let Some(c) = &self.credal {
            context = context.with_credal(c.clone());
        }
        context
    }
}

/// Reads `prob <label> = value` lines into a mass vector until `stop` or end
/// of input. Newlines are insignificant.
fn prob_lines(cur: &mut Cursor, space: &PossibilitySpace, stop: Option<char>) -> Result<MassFunction<Rational>, IoError> {
    let mut masses: Vec<Option<Rational>> = vec![None; space.len()];
    let start = cur.peek().clone();
    loop {
        cur.skip_newlines();
        match &cur.peek().tok {
            Tok::Sym(c) if Some(*c) == stop => break,
            Tok::Eof if stop.is_none() => break,
            Tok::Ident(k) if k == "prob" => {
                cur.next();
            }
            Tok::Ident(k) if k == "credal" && stop.is_none() => break,
            _ => return Err(cur.error("expected `prob`")),
        }
        let (label, _) = cur.ident("a state label")?;
        let state = space
            .state(&label)
            .ok_or_else(|| IoError::UnknownReference(label.clone()))?;
        cur.sym('=')?;
        let value = cur.rational()?;
        if masses[state].replace(value).is_some() {
            return Err(IoError::DuplicateDefinition(label));
        }
    }
    if let Some(missing) = masses.iter().position(Option::is_none) {
        return Err(IoError::syntax(
            start.line,
            start.col,
            format!("no mass given for state `{}`", space.label(missing)),
        ));
    }
    Ok(MassFunction::new(masses.into_iter().map(|m| m.expect("checked")).collect())?)
}

/// Parses a context file against the states of `space`.
///
/// ```text
/// prob w1 = 1/2
/// prob w2 = 1/2
/// credal {
///   prob w1 = 1/3
///   prob w2 = 2/3
/// } {
///   prob w1 = 2/3
///   prob w2 = 1/3
/// }
/// ```
pub fn parse_context_file(text: &str, space: &PossibilitySpace) -> Result<ContextDocument, IoError> {
    let mut cur = Cursor::new(lex(text)?.tokens);
    let mut doc = ContextDocument::default();
    loop {
        cur.skip_newlines();
        match cur.peek().tok.clone() {
            Tok::Eof => break,
            Tok::Ident(k) if k == "prob" => {
                if doc.probability.is_some() {
                    return Err(IoError::DuplicateDefinition("prob".into()));
                }
                doc.probability = Some(prob_lines(&mut cur, space, None)?);
            }
            Tok::Ident(k) if k == "credal" => {
                if doc.credal.is_some() {
                    return Err(IoError::DuplicateDefinition("credal".into()));
                }
                cur.next();
                let mut blocks = Vec::new();
                loop {
                    cur.skip_newlines();
                    if !cur.eat_sym('{') {
                        break;
                    }
                    blocks.push(prob_lines(&mut cur, space, Some('}'))?);
                    cur.sym('}')?;
                }
                if blocks.is_empty() {
                    return Err(cur.error("expected `{`"));
                }
                doc.credal = Some(blocks);
            }
            _ => return Err(cur.error("expected `prob` or `credal`")),
        }
    }
    Ok(doc)
}
