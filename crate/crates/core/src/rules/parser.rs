//! Recursive-descent parser for rule files.

use std::collections::{BTreeSet, HashSet};

use super::{Atom, DepPathStep, Direction, Field, Filler, Rule, SlotPattern, Tier, TokenPattern};
use crate::error::{Error, Result};
use crate::pipeline::schema::EventType;

/// Parse a rule file. Every returned rule satisfies the ruleset
/// invariants: unique names, indexable triggers, and high-tier rules
/// typed end to end.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>> {
    let mut p = Parser::new(text);
    let mut rules: Vec<Rule> = Vec::new();
    let mut names = HashSet::new();
    loop {
        p.skip_trivia();
        if p.at_end() {
            break;
        }
        let at = p.pos();
        let rule = p.rule()?;
        if !names.insert(rule.name.clone()) {
            return Err(p.error_at(at, format!("duplicate rule name `{}`", rule.name)));
        }
        rules.push(rule);
    }
    Ok(rules)
}

#[derive(Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

struct Parser {
    chars: Vec<char>,
    offset: usize,
    line: usize,
    column: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '$' | '\'' | '/' | '+' | ',')
}

fn is_literal_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '[' | ']' | '&' | '|' | '=' | '!' | '"' | '{' | '}' | '#')
}

fn is_label_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | ':' | '-' | '.')
}

impl Parser {
    fn new(text: &str) -> Self {
        Self {
            chars: text.chars().collect(),
            offset: 0,
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn error_at(&self, at: Pos, message: impl Into<String>) -> Error {
        Error::Rule {
            line: at.line,
            column: at.column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        self.error_at(self.pos(), message)
    }

    fn at_end(&self) -> bool {
        self.offset >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Whitespace and `#` comments.
    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of input"))),
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_trivia();
        if self.peek() == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        self.skip_trivia();
        let word = self.take_while(|c| c.is_alphanumeric() || c == '_');
        if word.is_empty() {
            return Err(self.error(format!("expected {what}")));
        }
        Ok(word)
    }

    fn name(&mut self, what: &str) -> Result<String> {
        self.skip_trivia();
        let word = self.take_while(|c| is_word_char(c) && c != ',' && c != ':');
        if word.is_empty() {
            return Err(self.error(format!("expected {what}")));
        }
        Ok(word)
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        self.skip_trivia();
        let at = self.pos();
        let word = self.ident(&format!("`{kw}`"))?;
        if word != kw {
            return Err(self.error_at(at, format!("expected `{kw}`, found `{word}`")));
        }
        Ok(())
    }

    fn rule(&mut self) -> Result<Rule> {
        let rule_pos = self.pos();
        self.keyword("rule")?;
        let name = self.name("rule name")?;
        self.expect('{')?;

        let mut event_type = None;
        let mut tier = None;
        let mut trigger = None;
        let mut slots: Vec<SlotPattern> = Vec::new();
        let mut slot_positions = Vec::new();

        loop {
            self.skip_trivia();
            if self.eat('}') {
                break;
            }
            if self.at_end() {
                return Err(self.error(format!("unterminated rule `{name}`")));
            }
            let at = self.pos();
            let key = self.ident("rule item")?;
            match key.as_str() {
                "event" => {
                    self.expect(':')?;
                    self.skip_trivia();
                    let v_at = self.pos();
                    let v = self.ident("event type")?;
                    let parsed = match v.as_str() {
                        "LAUNCH" => EventType::Launch,
                        "FAILURE" => EventType::Failure,
                        "DECOMMISSIONING" => EventType::Decommissioning,
                        _ => return Err(self.error_at(v_at, format!("unknown event type `{v}`"))),
                    };
                    if event_type.replace(parsed).is_some() {
                        return Err(self.error_at(at, "duplicate `event`"));
                    }
                }
                "tier" => {
                    self.expect(':')?;
                    self.skip_trivia();
                    let v_at = self.pos();
                    let v = self.ident("tier")?;
                    let parsed = match v.as_str() {
                        "high" => Tier::High,
                        "backoff" => Tier::Backoff,
                        _ => return Err(self.error_at(v_at, format!("unknown tier `{v}`"))),
                    };
                    if tier.replace(parsed).is_some() {
                        return Err(self.error_at(at, "duplicate `tier`"));
                    }
                }
                "trigger" => {
                    self.expect(':')?;
                    let patterns = self.trigger()?;
                    if trigger.replace(patterns).is_some() {
                        return Err(self.error_at(at, "duplicate `trigger`"));
                    }
                }
                "slot" => {
                    let slot = self.slot()?;
                    if slots.iter().any(|s| s.slot == slot.slot) {
                        return Err(self.error_at(at, format!("duplicate slot `{}`", slot.slot)));
                    }
                    slots.push(slot);
                    slot_positions.push(at);
                }
                other => return Err(self.error_at(at, format!("unknown rule item `{other}`"))),
            }
        }

        let event_type = event_type.ok_or_else(|| self.error_at(rule_pos, format!("rule `{name}` has no `event`")))?;
        let tier = tier.ok_or_else(|| self.error_at(rule_pos, format!("rule `{name}` has no `tier`")))?;
        let trigger = trigger.ok_or_else(|| self.error_at(rule_pos, format!("rule `{name}` has no `trigger`")))?;

        let schema = event_type.schema();
        for (slot, at) in slots.iter().zip(&slot_positions) {
            if !schema.has_slot(&slot.slot) {
                return Err(self.error_at(
                    *at,
                    format!("slot `{}` is not part of the {event_type} schema", slot.slot),
                ));
            }
            if tier == Tier::High && slot.filler == Filler::NpChunk {
                return Err(self.error_at(
                    *at,
                    format!(
                        "tier violation: high-tier rule `{name}` uses a chunk filler for `{}`",
                        slot.slot
                    ),
                ));
            }
        }
        if tier == Tier::High
            && !slots
                .iter()
                .any(|s| s.required && schema.mandatory_any.contains(&s.slot.as_str()))
        {
            return Err(self.error_at(
                rule_pos,
                format!(
                    "tier violation: high-tier rule `{name}` must require one of {}",
                    schema.mandatory_any.join(", ")
                ),
            ));
        }

        Ok(Rule {
            name,
            event_type,
            tier,
            trigger,
            slots,
        })
    }

    fn trigger(&mut self) -> Result<Vec<TokenPattern>> {
        let mut patterns = Vec::new();
        loop {
            self.skip_trivia();
            if self.peek() != Some('[') {
                break;
            }
            patterns.push(self.token_pattern()?);
        }
        if patterns.is_empty() {
            return Err(self.error("expected `[` starting a token pattern"));
        }
        Ok(patterns)
    }

    fn token_pattern(&mut self) -> Result<TokenPattern> {
        let open = self.pos();
        self.expect('[')?;
        let mut alternatives = vec![vec![self.atom()?]];
        loop {
            self.skip_trivia();
            match self.peek() {
                Some(']') => {
                    self.bump();
                    break;
                }
                Some('&') => {
                    self.bump();
                    let atom = self.atom()?;
                    alternatives.last_mut().expect("non-empty").push(atom);
                }
                Some('|') => {
                    self.bump();
                    if self.starts_atom() {
                        alternatives.push(vec![self.atom()?]);
                    } else {
                        let value = self.literal()?;
                        let last = alternatives
                            .last_mut()
                            .expect("non-empty")
                            .last_mut()
                            .expect("non-empty");
                        let value = fold_value(last.field, value);
                        last.values.push(value);
                    }
                }
                Some(c) => return Err(self.error(format!("unexpected `{c}` in token pattern"))),
                None => return Err(self.error_at(open, "unterminated token pattern")),
            }
        }
        for conj in &alternatives {
            if !conj.iter().any(|a| !a.negated && a.field.is_indexed()) {
                return Err(self.error_at(
                    open,
                    "every alternative of a token pattern needs a positive surface= or lemma= atom",
                ));
            }
        }
        Ok(TokenPattern { alternatives })
    }

    /// Lookahead for `!`? field `=`.
    fn starts_atom(&mut self) -> bool {
        self.skip_trivia();
        let mut i = self.offset;
        if self.chars.get(i) == Some(&'!') {
            return true;
        }
        let start = i;
        while self.chars.get(i).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
            i += 1;
        }
        if i == start {
            return false;
        }
        let word: String = self.chars[start..i].iter().collect();
        while self.chars.get(i).is_some_and(|c| *c == ' ' || *c == '\t') {
            i += 1;
        }
        self.chars.get(i) == Some(&'=') && matches!(word.as_str(), "surface" | "lemma" | "pos" | "ner")
    }

    fn atom(&mut self) -> Result<Atom> {
        self.skip_trivia();
        let negated = self.eat('!');
        self.skip_trivia();
        let at = self.pos();
        let field = match self.ident("atom field")?.as_str() {
            "surface" => Field::Surface,
            "lemma" => Field::Lemma,
            "pos" => Field::Pos,
            "ner" => Field::Ner,
            other => return Err(self.error_at(at, format!("unknown field `{other}`"))),
        };
        self.expect('=')?;
        let value = fold_value(field, self.literal()?);
        Ok(Atom {
            field,
            values: vec![value],
            negated,
        })
    }

    fn literal(&mut self) -> Result<String> {
        self.skip_trivia();
        if self.peek() == Some('"') {
            let at = self.pos();
            self.bump();
            let mut out = String::new();
            loop {
                match self.bump() {
                    Some('"') => break,
                    Some('\\') => match self.bump() {
                        Some(c) => out.push(c),
                        None => return Err(self.error_at(at, "unterminated string")),
                    },
                    Some('\n') | None => return Err(self.error_at(at, "unterminated string")),
                    Some(c) => out.push(c),
                }
            }
            if out.is_empty() {
                return Err(self.error_at(at, "empty literal"));
            }
            return Ok(out);
        }
        let word = self.take_while(is_literal_char);
        if word.is_empty() {
            return Err(self.error("expected a literal value"));
        }
        Ok(word)
    }

    fn slot(&mut self) -> Result<SlotPattern> {
        let name = self.ident("slot name")?;
        self.skip_trivia();
        let at = self.pos();
        let required = match self.ident("`required` or `optional`")?.as_str() {
            "required" => true,
            "optional" => false,
            other => return Err(self.error_at(at, format!("expected `required` or `optional`, found `{other}`"))),
        };
        self.expect('{')?;
        let mut path = None;
        let mut filler = None;
        loop {
            self.skip_trivia();
            if self.eat('}') {
                break;
            }
            if self.at_end() {
                return Err(self.error(format!("unterminated slot `{name}`")));
            }
            let key_at = self.pos();
            match self.ident("slot item")?.as_str() {
                "path" => {
                    self.expect(':')?;
                    let steps = self.path()?;
                    if path.replace(steps).is_some() {
                        return Err(self.error_at(key_at, "duplicate `path`"));
                    }
                }
                "filler" => {
                    self.expect(':')?;
                    let f = self.filler()?;
                    if filler.replace(f).is_some() {
                        return Err(self.error_at(key_at, "duplicate `filler`"));
                    }
                }
                other => return Err(self.error_at(key_at, format!("unknown slot item `{other}`"))),
            }
        }
        let path = path.ok_or_else(|| self.error_at(at, format!("slot `{name}` has no `path`")))?;
        let filler = filler.ok_or_else(|| self.error_at(at, format!("slot `{name}` has no `filler`")))?;
        Ok(SlotPattern {
            slot: name,
            path,
            filler,
            required,
        })
    }

    fn path(&mut self) -> Result<Vec<DepPathStep>> {
        let mut steps = Vec::new();
        loop {
            self.skip_trivia();
            let direction = match self.peek() {
                Some('>') => Direction::Outgoing,
                Some('<') => Direction::Incoming,
                _ => break,
            };
            self.bump();
            let mut labels = Vec::new();
            let parenthesized = self.peek() == Some('(');
            if parenthesized {
                self.bump();
            }
            loop {
                let label = self.take_while(is_label_char);
                if label.is_empty() {
                    return Err(self.error("expected a dependency label"));
                }
                labels.push(label);
                if self.peek() == Some('|') {
                    self.bump();
                } else {
                    break;
                }
            }
            if parenthesized {
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)` closing label alternation"));
                }
                self.bump();
            }
            let optional = self.peek() == Some('?');
            if optional {
                self.bump();
            }
            steps.push(DepPathStep {
                direction,
                labels,
                optional,
            });
        }
        if steps.is_empty() {
            return Err(self.error("expected a path step (`>label` or `<label`)"));
        }
        Ok(steps)
    }

    fn filler(&mut self) -> Result<Filler> {
        self.skip_trivia();
        let at = self.pos();
        match self.ident("filler")?.as_str() {
            "chunk" => Ok(Filler::NpChunk),
            "entity" => {
                self.expect('(')?;
                let mut types = BTreeSet::new();
                loop {
                    types.insert(self.ident("entity type")?);
                    if self.eat(',') {
                        continue;
                    }
                    self.expect(')')?;
                    break;
                }
                Ok(Filler::EntityTypes(types))
            }
            other => Err(self.error_at(at, format!("unknown filler `{other}`"))),
        }
    }
}

fn fold_value(field: Field, value: String) -> String {
    if field.is_indexed() {
        value.to_lowercase()
    } else {
        value
    }
}
