// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;

use indexmap::IndexMap;

use super::lexer::{tokenize, Spanned, Tok};
use super::*;
use crate::context::{ContextPath, PathSegment, Section};

/// Parses a `.adapt` document.
pub fn parse_rules(text: &str) -> Result<RulesModel, RulesError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0 };
    let mut rules = Vec::new();
    let mut ids = HashSet::new();
    loop {
        let pos = p.pos();
        if p.peek() == &Tok::Eof {
            if rules.is_empty() {
                return Err(p.syntax("expected at least one `rule`"));
            }
            break;
        }
        let rule = p.rule()?;
        if !ids.insert(rule.id.clone()) {
            return Err(RulesError {
                pos,
                kind: RulesErrorKind::DuplicateRuleId(rule.id),
            });
        }
        rules.push(rule);
    }
    Ok(RulesModel { rules })
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
}

const MODALITY_KEYS: [&str; 2] = ["text_to_speech", "speech_to_text"];
const NAVIGATION_KEYS: [&str; 2] = ["container_key", "group"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek2(&self) -> &Tok {
        let i = (self.at + 1).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> SourcePos {
        self.toks[self.at].pos
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax(&self, msg: impl Into<String>) -> RulesError {
        RulesError {
            pos: self.pos(),
            kind: RulesErrorKind::Syntax(msg.into()),
        }
    }

    fn fail<T>(&self, pos: SourcePos, kind: RulesErrorKind) -> Result<T, RulesError> {
        Err(RulesError { pos, kind })
    }

    fn unexpected(&self, wanted: &str) -> RulesError {
        self.syntax(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), RulesError> {
        if self.peek() == &tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), RulesError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<String, RulesError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn string(&mut self) -> Result<String, RulesError> {
        match self.peek() {
            Tok::Str(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => Err(self.unexpected("string")),
        }
    }

    fn field_string(&mut self, kw: &str) -> Result<String, RulesError> {
        self.keyword(kw)?;
        self.expect(Tok::Colon)?;
        self.string()
    }

    fn string_list(&mut self) -> Result<Vec<String>, RulesError> {
        self.expect(Tok::LBracket)?;
        let mut out = vec![self.string()?];
        while self.peek() == &Tok::Comma {
            self.next();
            out.push(self.string()?);
        }
        self.expect(Tok::RBracket)?;
        Ok(out)
    }

    fn rule(&mut self) -> Result<AdaptationRule, RulesError> {
        let pos = self.pos();
        self.keyword("rule")?;
        let id = self.string()?;
        self.expect(Tok::LBrace)?;
        let wcag = if self.at_keyword("wcag") {
            Some(self.field_string("wcag")?)
        } else {
            None
        };
        let comment = if self.at_keyword("comment") {
            self.rule_comment()?
        } else {
            RuleComment::default()
        };
        self.keyword("condition")?;
        self.expect(Tok::Colon)?;
        let condition = self.or_expr()?;
        let ops_pos = self.pos();
        self.keyword("operations")?;
        self.expect(Tok::LBrace)?;
        let mut operations = Vec::new();
        while self.at_keyword("operation") {
            operations.push(self.operation()?);
        }
        if operations.is_empty() && self.peek() == &Tok::RBrace {
            return self.fail(ops_pos, RulesErrorKind::NoOperations);
        }
        self.expect(Tok::RBrace)?;
        self.expect(Tok::RBrace)?;
        Ok(AdaptationRule {
            id,
            wcag,
            comment,
            condition,
            operations,
            pos,
        })
    }

    fn rule_comment(&mut self) -> Result<RuleComment, RulesError> {
        self.keyword("comment")?;
        self.expect(Tok::LBrace)?;
        let mut c = RuleComment::default();
        while self.peek() != &Tok::RBrace {
            let pos = self.pos();
            let field = self.ident()?;
            self.expect(Tok::Colon)?;
            let value = self.string()?;
            let slot = match field.as_str() {
                "problem" => &mut c.problem,
                "solution" => &mut c.solution,
                "advantages" => &mut c.advantages,
                "tradeoffs" => &mut c.tradeoffs,
                other => {
                    return self.fail(
                        pos,
                        RulesErrorKind::Syntax(format!("unknown comment field `{other}`")),
                    )
                }
            };
            if slot.replace(value).is_some() {
                return self.fail(
                    pos,
                    RulesErrorKind::Syntax(format!("duplicate comment field `{field}`")),
                );
            }
        }
        self.next();
        Ok(c)
    }

    fn or_expr(&mut self) -> Result<ConditionExpr, RulesError> {
        let mut items = vec![self.and_expr()?];
        while self.peek() == &Tok::OrOr {
            self.next();
            items.push(self.and_expr()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            ConditionExpr::Or(items)
        })
    }

    fn and_expr(&mut self) -> Result<ConditionExpr, RulesError> {
        let mut items = vec![self.not_expr()?];
        while self.peek() == &Tok::AndAnd {
            self.next();
            items.push(self.not_expr()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            ConditionExpr::And(items)
        })
    }

    fn not_expr(&mut self) -> Result<ConditionExpr, RulesError> {
        if self.peek() == &Tok::Bang {
            self.next();
            Ok(ConditionExpr::Not(Box::new(self.primary()?)))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<ConditionExpr, RulesError> {
        if self.peek() == &Tok::LParen {
            self.next();
            let e = self.or_expr()?;
            self.expect(Tok::RParen)?;
            return Ok(e);
        }
        let pos = self.pos();
        let path = self.path()?;
        let op = match self.next() {
            Tok::EqEq => RelOp::Eq,
            Tok::Ne => RelOp::Ne,
            Tok::Lt => RelOp::Lt,
            Tok::Le => RelOp::Le,
            Tok::Gt => RelOp::Gt,
            Tok::Ge => RelOp::Ge,
            other => {
                self.at -= 1;
                return Err(self.syntax(format!(
                    "expected comparison operator, found {}",
                    other.describe()
                )));
            }
        };
        let literal = self.literal()?;
        Ok(ConditionExpr::Compare(Comparison {
            path,
            op,
            literal,
            pos,
        }))
    }

    fn path(&mut self) -> Result<ContextPath, RulesError> {
        let pos = self.pos();
        let head = self.ident()?;
        let Some(section) = Section::from_name(&head) else {
            return self.fail(
                pos,
                RulesErrorKind::Syntax(format!(
                    "path must start with user, platform, or environment, found `{head}`"
                )),
            );
        };
        let mut segs = Vec::new();
        while self.peek() == &Tok::Dot {
            self.next();
            let kind = self.ident()?;
            let name = if self.peek() == &Tok::LBracket {
                self.next();
                let n = self.ident()?;
                self.expect(Tok::RBracket)?;
                Some(n)
            } else {
                None
            };
            segs.push(PathSegment { kind, name });
        }
        match segs.pop() {
            Some(PathSegment { kind, name: None }) => Ok(ContextPath::new(section, segs, kind)),
            Some(_) => Err(self.syntax("path must end with an attribute name")),
            None => Err(self.syntax("path must name an attribute")),
        }
    }

    fn literal(&mut self) -> Result<Literal, RulesError> {
        let lit = match self.peek() {
            Tok::Num(n) => Literal::Number(*n),
            Tok::Str(s) => Literal::Str(s.clone()),
            Tok::Ident(s) if s == "true" => Literal::Bool(true),
            Tok::Ident(s) if s == "false" => Literal::Bool(false),
            Tok::Ident(s) => Literal::Ident(s.clone()),
            _ => return Err(self.unexpected("literal")),
        };
        self.next();
        Ok(lit)
    }

    fn operation(&mut self) -> Result<Operation, RulesError> {
        let pos = self.pos();
        self.keyword("operation")?;
        self.expect(Tok::LBrace)?;

        self.keyword("key")?;
        self.expect(Tok::Colon)?;
        let key_pos = self.pos();
        let keys = if self.peek() == &Tok::Star {
            self.next();
            KeySpec::All
        } else {
            KeySpec::Keys(self.string_list()?)
        };

        self.keyword("widget_type")?;
        self.expect(Tok::Colon)?;
        let widget_type = self.ident()?;

        self.keyword("adaptation_type")?;
        self.expect(Tok::Colon)?;
        let atype_pos = self.pos();
        let atype = match self.ident()?.as_str() {
            "presentation" => AdaptationType::Presentation,
            "modality" => AdaptationType::Modality,
            "navigation" => AdaptationType::Navigation,
            other => {
                return self.fail(
                    atype_pos,
                    RulesErrorKind::Syntax(format!(
                        "adaptation_type must be presentation, modality, or navigation, found `{other}`"
                    )),
                )
            }
        };
        if keys == KeySpec::All && atype != AdaptationType::Presentation {
            return self.fail(key_pos, RulesErrorKind::WildcardNotAllowed);
        }

        let comment = if self.at_keyword("comment") {
            Some(self.field_string("comment")?)
        } else {
            None
        };

        self.keyword("adaptations")?;
        self.expect(Tok::LBrace)?;
        let payload = match atype {
            AdaptationType::Presentation => Payload::Presentation(self.presentation()?),
            AdaptationType::Modality => Payload::Modality(self.modality(pos)?),
            AdaptationType::Navigation => Payload::Navigation(self.navigation()?),
        };
        self.expect(Tok::RBrace)?;
        self.expect(Tok::RBrace)?;
        Ok(Operation {
            keys,
            widget_type,
            comment,
            payload,
            pos,
        })
    }

    fn mismatch<T>(&self, expected: AdaptationType, entry: String) -> Result<T, RulesError> {
        self.fail(
            self.pos(),
            RulesErrorKind::PayloadMismatch { expected, entry },
        )
    }

    fn presentation(&mut self) -> Result<PresentationPayload, RulesError> {
        let mut payload = PresentationPayload {
            properties: IndexMap::new(),
            raw_args: IndexMap::new(),
        };
        while self.peek() != &Tok::RBrace {
            let pos = self.pos();
            let Tok::Ident(name) = self.peek().clone() else {
                return Err(self.unexpected("property name or `raw_arg`"));
            };
            if MODALITY_KEYS.contains(&name.as_str()) || NAVIGATION_KEYS.contains(&name.as_str()) {
                return self.mismatch(AdaptationType::Presentation, name);
            }
            if name == "raw_arg" && self.peek2() == &Tok::LBrace {
                self.next();
                self.next();
                let arg = self.field_string("name")?;
                let code = self.field_string("code")?;
                self.expect(Tok::RBrace)?;
                if payload.raw_args.insert(arg.clone(), code).is_some() {
                    return self.fail(
                        pos,
                        RulesErrorKind::InvalidPayload(format!("duplicate raw_arg `{arg}`")),
                    );
                }
                continue;
            }
            self.next();
            self.expect(Tok::Colon)?;
            let value = self.literal()?;
            if payload.properties.insert(name.clone(), value).is_some() {
                return self.fail(
                    pos,
                    RulesErrorKind::InvalidPayload(format!("duplicate property `{name}`")),
                );
            }
        }
        Ok(payload)
    }

    fn modality(&mut self, op_pos: SourcePos) -> Result<ModalityPayload, RulesError> {
        let mut tts = None;
        let mut stt = None;
        while self.peek() != &Tok::RBrace {
            let pos = self.pos();
            let name = self.ident()?;
            let slot = match name.as_str() {
                "text_to_speech" => &mut tts,
                "speech_to_text" => &mut stt,
                _ => {
                    return self.fail(
                        pos,
                        RulesErrorKind::PayloadMismatch {
                            expected: AdaptationType::Modality,
                            entry: name,
                        },
                    )
                }
            };
            self.expect(Tok::Colon)?;
            let flag = match self.next() {
                Tok::Ident(s) if s == "true" => true,
                Tok::Ident(s) if s == "false" => false,
                other => {
                    self.at -= 1;
                    return Err(self.syntax(format!(
                        "expected `true` or `false`, found {}",
                        other.describe()
                    )));
                }
            };
            if slot.replace(flag).is_some() {
                return self.fail(
                    pos,
                    RulesErrorKind::InvalidPayload(format!("duplicate modality flag `{name}`")),
                );
            }
        }
        let payload = ModalityPayload {
            text_to_speech: tts.unwrap_or(false),
            speech_to_text: stt.unwrap_or(false),
        };
        if !payload.text_to_speech && !payload.speech_to_text {
            return self.fail(
                op_pos,
                RulesErrorKind::InvalidPayload(
                    "modality payload must enable text_to_speech or speech_to_text".into(),
                ),
            );
        }
        Ok(payload)
    }

    fn navigation(&mut self) -> Result<NavigationPayload, RulesError> {
        if let Tok::Ident(name) = self.peek() {
            if name != "container_key" {
                return self.mismatch(AdaptationType::Navigation, name.clone());
            }
        }
        let container_key = self.field_string("container_key")?;
        let mut groups: Vec<FormGroup> = Vec::new();
        let mut members = HashSet::new();
        while self.peek() != &Tok::RBrace {
            let pos = self.pos();
            if let Tok::Ident(name) = self.peek() {
                if name != "group" {
                    return self.mismatch(AdaptationType::Navigation, name.clone());
                }
            }
            self.keyword("group")?;
            let title = self.string()?;
            self.expect(Tok::LBrace)?;
            self.keyword("order")?;
            self.expect(Tok::Colon)?;
            let order = self.string_list()?;
            self.expect(Tok::RBrace)?;
            if groups.iter().any(|g| g.title == title) {
                return self.fail(
                    pos,
                    RulesErrorKind::InvalidPayload(format!("duplicate group title \"{title}\"")),
                );
            }
            for key in &order {
                if !members.insert(key.clone()) {
                    return self.fail(
                        pos,
                        RulesErrorKind::InvalidPayload(format!(
                            "key \"{key}\" appears in more than one group position"
                        )),
                    );
                }
            }
            groups.push(FormGroup { title, order });
        }
        if groups.len() < 2 {
            return Err(self.syntax("navigation payload requires at least two groups"));
        }
        Ok(NavigationPayload {
            container_key,
            groups,
        })
    }
}
