//! Recursive-descent parser for the declaration language. Produces a
//! [`Document`] whose every declaration already passed its module's
//! build/validate operation; dynamic types are registered as their
//! annotations are encountered.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::conspec::{build_con_spec, ConSpec, ConstructorName, ConstructorSig};
use crate::construction::{validate, Construction, Token, TokenId, Violation};
use crate::schema::{build_schema, RelConstraint, RelationLabel, TransferSchema};
use crate::typesys::{build_type_system, TypeName, TypeSystem};

use super::lexer::{tokenize, Diagnostic, Keyword, Lex, Lexeme, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionDecl {
    pub name: String,
    pub space: String,
    pub construction: Construction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Declaration {
    TypeSystem(TypeSystem),
    ConSpec(ConSpec),
    Construction(ConstructionDecl),
    Schema(TransferSchema),
}

/// An ordered sequence of validated declarations. Later declarations may
/// only name earlier ones; type systems accumulate the dynamic types their
/// users register.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub declarations: Vec<Declaration>,
}

impl Document {
    pub fn type_system(&self, name: &str) -> Option<&TypeSystem> {
        self.declarations.iter().find_map(|d| match d {
            Declaration::TypeSystem(ts) if ts.name() == name => Some(ts),
            _ => None,
        })
    }

    fn type_system_mut(&mut self, name: &str) -> Option<&mut TypeSystem> {
        self.declarations.iter_mut().find_map(|d| match d {
            Declaration::TypeSystem(ts) if ts.name() == name => Some(ts),
            _ => None,
        })
    }

    pub fn con_spec(&self, name: &str) -> Option<&ConSpec> {
        self.declarations.iter().find_map(|d| match d {
            Declaration::ConSpec(cs) if cs.name() == name => Some(cs),
            _ => None,
        })
    }

    pub fn construction(&self, name: &str) -> Option<&ConstructionDecl> {
        self.declarations.iter().find_map(|d| match d {
            Declaration::Construction(c) if c.name == name => Some(c),
            _ => None,
        })
    }

    pub fn schema(&self, name: &str) -> Option<&TransferSchema> {
        self.declarations.iter().find_map(|d| match d {
            Declaration::Schema(s) if s.name == name => Some(s),
            _ => None,
        })
    }

    /// Schemas bridging the given space pair, in declaration order.
    pub fn schemas_bridging(&self, source_space: &str, target_space: &str) -> Vec<&TransferSchema> {
        self.declarations
            .iter()
            .filter_map(|d| match d {
                Declaration::Schema(s)
                    if s.source_space == source_space && s.target_space == target_space =>
                {
                    Some(s)
                }
                _ => None,
            })
            .collect()
    }

    /// The type system a constructor specification is bound to.
    pub fn type_system_of(&self, con_spec_name: &str) -> Option<&TypeSystem> {
        let cs = self.con_spec(con_spec_name)?;
        self.type_system(cs.type_system_name())
    }
}

/// Parses one logical document from an ordered list of `(file name, text)`
/// pairs.
pub fn parse_document(files: &[(&str, &str)]) -> Result<Document, Vec<Diagnostic>> {
    let mut doc = Document::default();
    for (file, text) in files {
        let lexemes = tokenize(file, text).map_err(|d| vec![d])?;
        let mut parser = Parser::new(file, &lexemes);
        while !parser.at_end() {
            parse_declaration(&mut parser, &mut doc)?;
        }
    }
    Ok(doc)
}

/// Convenience wrapper for a single anonymous input.
pub fn parse_document_str(text: &str) -> Result<Document, Vec<Diagnostic>> {
    parse_document(&[("<input>", text)])
}

/// Parses one construction body in the context of a constructor
/// specification, returning the construction and the (possibly extended)
/// type system. The construction is validated.
pub fn parse_construction_term(
    text: &str,
    con_spec: &ConSpec,
    type_system: &TypeSystem,
) -> Result<(Construction, TypeSystem), Vec<Diagnostic>> {
    let lexemes = tokenize("<term>", text).map_err(|d| vec![d])?;
    let mut parser = Parser::new("<term>", &lexemes);
    let raw = parse_cterm(&mut parser).map_err(|d| vec![d])?;
    if !parser.at_end() {
        return Err(vec![parser.unexpected("end of input")]);
    }
    let lowered = lower_cterm(&raw, type_system)?;
    let report = validate(&lowered.construction, con_spec, &lowered.type_system);
    if !report.is_ok() {
        return Err(violations_to_diagnostics(
            report.violations(),
            &lowered.spans,
            &raw.span(),
        ));
    }
    Ok((lowered.construction, lowered.type_system))
}

struct Parser<'a> {
    lexemes: &'a [Lexeme],
    pos: usize,
    eof_span: SourceSpan,
}

impl<'a> Parser<'a> {
    fn new(file: &str, lexemes: &'a [Lexeme]) -> Self {
        let eof_span = lexemes
            .last()
            .map(|l| l.span.clone())
            .unwrap_or_else(|| SourceSpan::new(Arc::from(file), (1, 1), (1, 1)));
        Parser {
            lexemes,
            pos: 0,
            eof_span,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.lexemes.len()
    }

    fn peek(&self) -> Option<&'a Lexeme> {
        self.lexemes.get(self.pos)
    }

    fn peek_lex(&self) -> Option<&'a Lex> {
        self.peek().map(|l| &l.lex)
    }

    fn advance(&mut self) -> Option<&'a Lexeme> {
        let lexeme = self.lexemes.get(self.pos);
        if lexeme.is_some() {
            self.pos += 1;
        }
        lexeme
    }

    fn here(&self) -> SourceSpan {
        self.peek()
            .map(|l| l.span.clone())
            .unwrap_or_else(|| self.eof_span.clone())
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let found = self
            .peek()
            .map(|l| l.lex.describe())
            .unwrap_or_else(|| "end of input".to_owned());
        Diagnostic::new(self.here(), format!("expected {expected}, found {found}"))
    }

    fn expect(&mut self, lex: &Lex, expected: &str) -> Result<&'a Lexeme, Diagnostic> {
        match self.peek() {
            Some(l) if l.lex == *lex => Ok(self.advance().unwrap()),
            _ => Err(self.unexpected(expected)),
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> Result<&'a Lexeme, Diagnostic> {
        self.expect(&Lex::Keyword(kw), &format!("`{}`", kw.as_str()))
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, SourceSpan), Diagnostic> {
        match self.peek() {
            Some(Lexeme {
                lex: Lex::Ident(name),
                span,
            }) => {
                let out = (name.clone(), span.clone());
                self.advance();
                Ok(out)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn eat(&mut self, lex: &Lex) -> bool {
        if self.peek_lex() == Some(lex) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        matches!(self.peek_lex(), Some(Lex::Keyword(k)) if *k == kw)
    }
}

// ---------------------------------------------------------------------------
// raw construction terms

#[derive(Debug, Clone)]
struct RawAnn {
    id: String,
    ty: Option<String>,
    parent: Option<String>,
    span: SourceSpan,
}

#[derive(Debug, Clone)]
struct RawCterm {
    ann: RawAnn,
    body: Option<(String, SourceSpan, Vec<RawCterm>)>,
}

impl RawCterm {
    fn span(&self) -> SourceSpan {
        self.ann.span.clone()
    }
}

fn parse_token_ann(parser: &mut Parser) -> Result<RawAnn, Diagnostic> {
    let (id, span) = parser.expect_ident("a token name")?;
    let mut ty = None;
    let mut parent = None;
    if parser.eat(&Lex::Colon) {
        let (t, _) = parser.expect_ident("a type name")?;
        ty = Some(t);
        if parser.eat(&Lex::Colon) {
            let (p, _) = parser.expect_ident("an open family name")?;
            parent = Some(p);
        }
    }
    Ok(RawAnn {
        id,
        ty,
        parent,
        span,
    })
}

fn parse_cterm(parser: &mut Parser) -> Result<RawCterm, Diagnostic> {
    let ann = parse_token_ann(parser)?;
    let body = if parser.eat(&Lex::LArrow) {
        let (constructor, cspan) = parser.expect_ident("a constructor name")?;
        parser.expect(&Lex::LBrack, "`[`")?;
        let mut inputs = vec![parse_cterm(parser)?];
        while parser.eat(&Lex::Comma) {
            inputs.push(parse_cterm(parser)?);
        }
        parser.expect(&Lex::RBrack, "`]`")?;
        Some((constructor, cspan, inputs))
    } else {
        None
    };
    Ok(RawCterm { ann, body })
}

// ---------------------------------------------------------------------------
// lowering raw terms to constructions

#[derive(Debug, Default)]
pub(crate) struct SpanTables {
    pub tokens: BTreeMap<String, SourceSpan>,
    pub constructors: BTreeMap<String, SourceSpan>,
}

impl SpanTables {
    fn span_for_violation(&self, violation: &Violation, fallback: &SourceSpan) -> SourceSpan {
        let candidate = match violation {
            Violation::UnknownConstructor(c) | Violation::ArityMismatch { constructor: c, .. } => {
                self.constructors.get(c.as_str())
            }
            Violation::UnknownType { id, .. }
            | Violation::DuplicateBinding(id)
            | Violation::InconsistentTokenType { id, .. }
            | Violation::UnresolvedReference(id) => self.tokens.get(id.as_str()),
            Violation::OutputTypeViolation { token, .. } => self.tokens.get(token.id.as_str()),
            Violation::InputTypeViolation { token, .. } => self.tokens.get(token.id.as_str()),
        };
        candidate.cloned().unwrap_or_else(|| fallback.clone())
    }
}

struct Lowered {
    construction: Construction,
    type_system: TypeSystem,
    spans: SpanTables,
}

#[derive(Default)]
struct IdInfo {
    ty: Option<(String, SourceSpan)>,
    has_apply: bool,
    first_annotated_leaf: Option<usize>,
}

fn lower_cterm(raw: &RawCterm, type_system: &TypeSystem) -> Result<Lowered, Vec<Diagnostic>> {
    let mut ts = type_system.clone();
    let mut infos: BTreeMap<String, IdInfo> = BTreeMap::new();
    let mut spans = SpanTables::default();
    let mut diags: Vec<Diagnostic> = Vec::new();

    // pass 1: annotations, registrations, and binding-role bookkeeping
    let mut counter = 0usize;
    collect(
        raw,
        &mut counter,
        &mut infos,
        &mut spans,
        &mut ts,
        &mut diags,
    );
    for (id, info) in &infos {
        if info.has_apply && info.ty.is_none() {
            let span = spans.tokens.get(id).cloned().unwrap_or_else(|| raw.span());
            diags.push(Diagnostic::new(
                span,
                format!("token `{id}` is constructed here but never carries a type annotation"),
            ));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    // pass 2: build the tree; annotated re-occurrences become references
    let mut counter = 0usize;
    let construction = build(raw, &mut counter, &infos, &mut diags);
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(Lowered {
        construction,
        type_system: ts,
        spans,
    })
}

fn collect(
    raw: &RawCterm,
    counter: &mut usize,
    infos: &mut BTreeMap<String, IdInfo>,
    spans: &mut SpanTables,
    ts: &mut TypeSystem,
    diags: &mut Vec<Diagnostic>,
) {
    let index = *counter;
    *counter += 1;
    let ann = &raw.ann;
    spans
        .tokens
        .entry(ann.id.clone())
        .or_insert_with(|| ann.span.clone());

    if let Some(ty_text) = &ann.ty {
        if let Some(parent_text) = &ann.parent {
            match (
                TypeName::new(ty_text.clone()),
                TypeName::new(parent_text.clone()),
            ) {
                (Ok(ty), Ok(parent)) => match ts.register_dynamic_type(&ty, &parent) {
                    Ok(extended) => *ts = extended,
                    Err(err) => diags.push(Diagnostic::new(ann.span.clone(), err.to_string())),
                },
                _ => diags.push(Diagnostic::new(ann.span.clone(), "invalid type name")),
            }
        }
        let info = infos.entry(ann.id.clone()).or_default();
        match &info.ty {
            None => info.ty = Some((ty_text.clone(), ann.span.clone())),
            Some((first, _)) if first != ty_text => diags.push(Diagnostic::new(
                ann.span.clone(),
                format!(
                    "token `{}` was annotated `{}` earlier but `{}` here",
                    ann.id, first, ty_text
                ),
            )),
            Some(_) => {}
        }
    } else {
        infos.entry(ann.id.clone()).or_default();
    }

    match &raw.body {
        Some((constructor, cspan, inputs)) => {
            infos
                .get_mut(&ann.id)
                .expect("entry created above")
                .has_apply = true;
            spans
                .constructors
                .entry(constructor.clone())
                .or_insert_with(|| cspan.clone());
            for input in inputs {
                collect(input, counter, infos, spans, ts, diags);
            }
        }
        None => {
            let info = infos.get_mut(&ann.id).expect("entry created above");
            if ann.ty.is_some() && info.first_annotated_leaf.is_none() {
                info.first_annotated_leaf = Some(index);
            }
        }
    }
}

fn build(
    raw: &RawCterm,
    counter: &mut usize,
    infos: &BTreeMap<String, IdInfo>,
    diags: &mut Vec<Diagnostic>,
) -> Construction {
    let index = *counter;
    *counter += 1;
    let ann = &raw.ann;
    let info = &infos[&ann.id];

    let token = |diags: &mut Vec<Diagnostic>| -> Token {
        let (ty_text, _) = info.ty.as_ref().expect("checked before build");
        let id = TokenId::new(ann.id.clone());
        let ty = TypeName::new(ty_text.clone());
        match (id, ty) {
            (Ok(id), Ok(ty)) => Token::new(id, ty),
            _ => {
                diags.push(Diagnostic::new(
                    ann.span.clone(),
                    "invalid token annotation",
                ));
                Token::new(
                    TokenId::new("invalid").expect("fallback id"),
                    TypeName::new("invalid").expect("fallback type"),
                )
            }
        }
    };

    match &raw.body {
        Some((constructor, cspan, inputs)) => {
            let output = token(diags);
            let constructor = match ConstructorName::new(constructor.clone()) {
                Ok(c) => c,
                Err(err) => {
                    diags.push(Diagnostic::new(cspan.clone(), err.to_string()));
                    ConstructorName::new("invalid").expect("fallback constructor")
                }
            };
            let inputs = inputs
                .iter()
                .map(|i| build(i, counter, infos, diags))
                .collect();
            Construction::Apply {
                output,
                constructor,
                inputs,
            }
        }
        None => {
            let reference =
                info.has_apply || info.ty.is_none() || info.first_annotated_leaf != Some(index);
            if reference {
                match TokenId::new(ann.id.clone()) {
                    Ok(id) => Construction::Reference(id),
                    Err(err) => {
                        diags.push(Diagnostic::new(ann.span.clone(), err.to_string()));
                        Construction::Reference(TokenId::new("invalid").expect("fallback id"))
                    }
                }
            } else {
                Construction::Source(token(diags))
            }
        }
    }
}

fn violations_to_diagnostics(
    violations: &[Violation],
    spans: &SpanTables,
    fallback: &SourceSpan,
) -> Vec<Diagnostic> {
    violations
        .iter()
        .map(|v| Diagnostic::new(spans.span_for_violation(v, fallback), v.to_string()))
        .collect()
}

// ---------------------------------------------------------------------------
// declarations

fn parse_declaration(parser: &mut Parser, doc: &mut Document) -> Result<(), Vec<Diagnostic>> {
    match parser.peek_lex() {
        Some(Lex::Keyword(Keyword::TypeSystem)) => parse_type_system_decl(parser, doc),
        Some(Lex::Keyword(Keyword::ConSpec)) => parse_con_spec_decl(parser, doc),
        Some(Lex::Keyword(Keyword::Construction)) => parse_construction_decl(parser, doc),
        Some(Lex::Keyword(Keyword::TSchema)) => parse_schema_decl(parser, doc),
        _ => Err(vec![parser.unexpected(
            "`typeSystem`, `conSpec`, `construction`, or `tSchema`",
        )]),
    }
}

fn check_unique(
    kind: &str,
    name: &str,
    span: &SourceSpan,
    exists: bool,
) -> Result<(), Vec<Diagnostic>> {
    if exists {
        Err(vec![Diagnostic::new(
            span.clone(),
            format!("{kind} `{name}` is declared twice"),
        )])
    } else {
        Ok(())
    }
}

fn parse_type_system_decl(parser: &mut Parser, doc: &mut Document) -> Result<(), Vec<Diagnostic>> {
    parser
        .expect_keyword(Keyword::TypeSystem)
        .map_err(|d| vec![d])?;
    let (name, name_span) = parser
        .expect_ident("a type system name")
        .map_err(|d| vec![d])?;
    check_unique(
        "type system",
        &name,
        &name_span,
        doc.type_system(&name).is_some(),
    )?;
    parser.expect(&Lex::Eq, "`=`").map_err(|d| vec![d])?;
    parser.expect_keyword(Keyword::Types).map_err(|d| vec![d])?;

    let mut entries: Vec<(TypeName, bool)> = Vec::new();
    let mut entry_spans: BTreeMap<String, SourceSpan> = BTreeMap::new();
    loop {
        let open = parser.eat(&Lex::Underscore);
        if open {
            parser
                .expect(&Lex::Colon, "`:` after `_`")
                .map_err(|d| vec![d])?;
        }
        let (ty_text, ty_span) = parser.expect_ident("a type name").map_err(|d| vec![d])?;
        let ty = TypeName::new(ty_text.clone())
            .map_err(|e| vec![Diagnostic::new(ty_span.clone(), e.to_string())])?;
        entry_spans.entry(ty_text).or_insert(ty_span);
        entries.push((ty, open));
        if !parser.eat(&Lex::Comma) {
            break;
        }
    }

    let mut order: Vec<(TypeName, TypeName)> = Vec::new();
    if parser.at_keyword(Keyword::Order) {
        parser.advance();
        loop {
            let (sub_text, sub_span) = parser.expect_ident("a type name").map_err(|d| vec![d])?;
            parser.expect(&Lex::Lt, "`<`").map_err(|d| vec![d])?;
            let (sup_text, sup_span) = parser.expect_ident("a type name").map_err(|d| vec![d])?;
            let sub = TypeName::new(sub_text.clone())
                .map_err(|e| vec![Diagnostic::new(sub_span.clone(), e.to_string())])?;
            let sup = TypeName::new(sup_text.clone())
                .map_err(|e| vec![Diagnostic::new(sup_span.clone(), e.to_string())])?;
            entry_spans.entry(sub_text).or_insert(sub_span);
            entry_spans.entry(sup_text).or_insert(sup_span);
            order.push((sub, sup));
            if !parser.eat(&Lex::Comma) {
                break;
            }
        }
    }

    let ts = build_type_system(&name, &entries, &order).map_err(|e| {
        let span = match &e {
            crate::typesys::TypeSysError::DuplicateType(t)
            | crate::typesys::TypeSysError::UnknownTypeInOrder(t) => entry_spans
                .get(t.as_str())
                .cloned()
                .unwrap_or_else(|| name_span.clone()),
            _ => name_span.clone(),
        };
        vec![Diagnostic::new(span, e.to_string())]
    })?;
    doc.declarations.push(Declaration::TypeSystem(ts));
    Ok(())
}

fn parse_con_spec_decl(parser: &mut Parser, doc: &mut Document) -> Result<(), Vec<Diagnostic>> {
    parser
        .expect_keyword(Keyword::ConSpec)
        .map_err(|d| vec![d])?;
    let (name, name_span) = parser
        .expect_ident("a constructor specification name")
        .map_err(|d| vec![d])?;
    check_unique(
        "constructor specification",
        &name,
        &name_span,
        doc.con_spec(&name).is_some(),
    )?;
    parser.expect(&Lex::Colon, "`:`").map_err(|d| vec![d])?;
    let (ts_name, ts_span) = parser
        .expect_ident("a type system name")
        .map_err(|d| vec![d])?;
    parser.expect(&Lex::Eq, "`=`").map_err(|d| vec![d])?;

    let mut decls: Vec<(ConstructorName, ConstructorSig)> = Vec::new();
    let mut decl_spans: BTreeMap<String, SourceSpan> = BTreeMap::new();
    loop {
        let (cname_text, cname_span) = parser
            .expect_ident("a constructor name")
            .map_err(|d| vec![d])?;
        parser.expect(&Lex::Colon, "`:`").map_err(|d| vec![d])?;
        parser.expect(&Lex::LBrack, "`[`").map_err(|d| vec![d])?;
        let mut inputs = Vec::new();
        loop {
            let (ty_text, ty_span) = parser.expect_ident("an input type").map_err(|d| vec![d])?;
            inputs.push(
                TypeName::new(ty_text)
                    .map_err(|e| vec![Diagnostic::new(ty_span, e.to_string())])?,
            );
            if !parser.eat(&Lex::Comma) {
                break;
            }
        }
        parser.expect(&Lex::RBrack, "`]`").map_err(|d| vec![d])?;
        parser.expect(&Lex::RArrow, "`->`").map_err(|d| vec![d])?;
        let (out_text, out_span) = parser.expect_ident("an output type").map_err(|d| vec![d])?;
        let output =
            TypeName::new(out_text).map_err(|e| vec![Diagnostic::new(out_span, e.to_string())])?;
        let cname = ConstructorName::new(cname_text.clone())
            .map_err(|e| vec![Diagnostic::new(cname_span.clone(), e.to_string())])?;
        decl_spans.entry(cname_text).or_insert(cname_span);
        decls.push((cname, ConstructorSig { inputs, output }));
        if !parser.eat(&Lex::Comma) {
            break;
        }
    }

    let ts = doc.type_system(&ts_name).ok_or_else(|| {
        vec![Diagnostic::new(
            ts_span.clone(),
            format!(
                "type system `{ts_name}` is not declared yet (forward references are not allowed)"
            ),
        )]
    })?;
    let cs = build_con_spec(&name, ts, &decls).map_err(|e| {
        let span = match &e {
            crate::conspec::ConSpecError::DuplicateConstructor(c)
            | crate::conspec::ConSpecError::EmptyInputs(c)
            | crate::conspec::ConSpecError::UnknownType { constructor: c, .. } => decl_spans
                .get(c.as_str())
                .cloned()
                .unwrap_or_else(|| name_span.clone()),
            _ => name_span.clone(),
        };
        vec![Diagnostic::new(span, e.to_string())]
    })?;
    doc.declarations.push(Declaration::ConSpec(cs));
    Ok(())
}

fn parse_construction_decl(parser: &mut Parser, doc: &mut Document) -> Result<(), Vec<Diagnostic>> {
    parser
        .expect_keyword(Keyword::Construction)
        .map_err(|d| vec![d])?;
    let (name, name_span) = parser
        .expect_ident("a construction name")
        .map_err(|d| vec![d])?;
    check_unique(
        "construction",
        &name,
        &name_span,
        doc.construction(&name).is_some(),
    )?;
    parser.expect(&Lex::Colon, "`:`").map_err(|d| vec![d])?;
    let (cs_name, cs_span) = parser
        .expect_ident("a constructor specification name")
        .map_err(|d| vec![d])?;
    parser.expect(&Lex::Eq, "`=`").map_err(|d| vec![d])?;
    let raw = parse_cterm(parser).map_err(|d| vec![d])?;

    let cs = doc
        .con_spec(&cs_name)
        .ok_or_else(|| {
            vec![Diagnostic::new(
                cs_span.clone(),
                format!(
                    "constructor specification `{cs_name}` is not declared yet (forward references are not allowed)"
                ),
            )]
        })?
        .clone();
    let ts_name = cs.type_system_name().to_owned();
    let ts = doc
        .type_system(&ts_name)
        .ok_or_else(|| {
            vec![Diagnostic::new(
                cs_span.clone(),
                format!("type system `{ts_name}` is missing"),
            )]
        })?
        .clone();

    let lowered = lower_cterm(&raw, &ts)?;
    let report = validate(&lowered.construction, &cs, &lowered.type_system);
    if !report.is_ok() {
        return Err(violations_to_diagnostics(
            report.violations(),
            &lowered.spans,
            &raw.span(),
        ));
    }
    *doc.type_system_mut(&ts_name).expect("checked above") = lowered.type_system;
    doc.declarations
        .push(Declaration::Construction(ConstructionDecl {
            name,
            space: cs_name,
            construction: lowered.construction,
        }));
    Ok(())
}

/// `([a, b2],[c]) :: relation`; annotations on constraint tokens are
/// references back to pattern tokens and must agree with their types.
struct RawRel {
    source: Vec<RawAnn>,
    target: Vec<RawAnn>,
    relation: String,
    relation_span: SourceSpan,
}

fn parse_rel(parser: &mut Parser) -> Result<RawRel, Diagnostic> {
    parser.expect(&Lex::LParen, "`(`")?;
    parser.expect(&Lex::LBrack, "`[`")?;
    let mut source = Vec::new();
    if parser.peek_lex() != Some(&Lex::RBrack) {
        source.push(parse_token_ann(parser)?);
        while parser.eat(&Lex::Comma) {
            source.push(parse_token_ann(parser)?);
        }
    }
    parser.expect(&Lex::RBrack, "`]`")?;
    parser.expect(&Lex::Comma, "`,`")?;
    parser.expect(&Lex::LBrack, "`[`")?;
    let mut target = Vec::new();
    if parser.peek_lex() != Some(&Lex::RBrack) {
        target.push(parse_token_ann(parser)?);
        while parser.eat(&Lex::Comma) {
            target.push(parse_token_ann(parser)?);
        }
    }
    parser.expect(&Lex::RBrack, "`]`")?;
    parser.expect(&Lex::RParen, "`)`")?;
    parser.expect(&Lex::ColonColon, "`::`")?;
    let (relation, relation_span) = parser.expect_ident("a relation name")?;
    Ok(RawRel {
        source,
        target,
        relation,
        relation_span,
    })
}

fn lower_rel(
    raw: &RawRel,
    source_pattern: &Construction,
    target_pattern: &Construction,
) -> Result<RelConstraint, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let check_side = |anns: &[RawAnn], pattern: &Construction, diags: &mut Vec<Diagnostic>| {
        let bindings = pattern.binding_map();
        let mut ids = Vec::new();
        for ann in anns {
            match TokenId::new(ann.id.clone()) {
                Ok(id) => {
                    if let Some(expected) = bindings.get(&id).and_then(|n| n.root_token()) {
                        if let Some(ty) = &ann.ty {
                            if expected.ty.as_str() != ty {
                                diags.push(Diagnostic::new(
                                    ann.span.clone(),
                                    format!(
                                        "constraint token `{}` is annotated `{}` but the pattern binds it at `{}`",
                                        ann.id, ty, expected.ty
                                    ),
                                ));
                            }
                        }
                    }
                    ids.push(id);
                }
                Err(e) => diags.push(Diagnostic::new(ann.span.clone(), e.to_string())),
            }
        }
        ids
    };
    let source_tokens = check_side(&raw.source, source_pattern, &mut diags);
    let target_tokens = check_side(&raw.target, target_pattern, &mut diags);
    let relation = RelationLabel::new(raw.relation.clone())
        .map_err(|e| vec![Diagnostic::new(raw.relation_span.clone(), e.to_string())])?;
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(RelConstraint {
        source_tokens,
        target_tokens,
        relation,
    })
}

fn parse_schema_decl(parser: &mut Parser, doc: &mut Document) -> Result<(), Vec<Diagnostic>> {
    parser
        .expect_keyword(Keyword::TSchema)
        .map_err(|d| vec![d])?;
    let (name, name_span) = parser.expect_ident("a schema name").map_err(|d| vec![d])?;
    check_unique("schema", &name, &name_span, doc.schema(&name).is_some())?;
    parser.expect(&Lex::Colon, "`:`").map_err(|d| vec![d])?;
    parser.expect(&Lex::LParen, "`(`").map_err(|d| vec![d])?;
    let (source_space, source_span) = parser
        .expect_ident("a source space name")
        .map_err(|d| vec![d])?;
    parser.expect(&Lex::Comma, "`,`").map_err(|d| vec![d])?;
    let (target_space, target_span) = parser
        .expect_ident("a target space name")
        .map_err(|d| vec![d])?;
    parser.expect(&Lex::RParen, "`)`").map_err(|d| vec![d])?;
    parser.expect(&Lex::Eq, "`=`").map_err(|d| vec![d])?;

    parser
        .expect_keyword(Keyword::Source)
        .map_err(|d| vec![d])?;
    let raw_source = parse_cterm(parser).map_err(|d| vec![d])?;
    parser
        .expect_keyword(Keyword::Target)
        .map_err(|d| vec![d])?;
    let raw_target = parse_cterm(parser).map_err(|d| vec![d])?;

    let mut raw_antecedents = Vec::new();
    if parser.at_keyword(Keyword::Antecedent) {
        parser.advance();
        raw_antecedents.push(parse_rel(parser).map_err(|d| vec![d])?);
        while parser.eat(&Lex::Comma) {
            raw_antecedents.push(parse_rel(parser).map_err(|d| vec![d])?);
        }
    }
    parser
        .expect_keyword(Keyword::Consequent)
        .map_err(|d| vec![d])?;
    let raw_consequent = parse_rel(parser).map_err(|d| vec![d])?;

    let resolve_space = |space: &str,
                         span: &SourceSpan|
     -> Result<(ConSpec, TypeSystem, String), Vec<Diagnostic>> {
        let cs = doc.con_spec(space).ok_or_else(|| {
            vec![Diagnostic::new(
                span.clone(),
                format!("constructor specification `{space}` is not declared yet (forward references are not allowed)"),
            )]
        })?;
        let ts_name = cs.type_system_name().to_owned();
        let ts = doc.type_system(&ts_name).ok_or_else(|| {
            vec![Diagnostic::new(
                span.clone(),
                format!("type system `{ts_name}` is missing"),
            )]
        })?;
        Ok((cs.clone(), ts.clone(), ts_name))
    };
    let (source_cs, source_ts, source_ts_name) = resolve_space(&source_space, &source_span)?;
    let (target_cs, target_ts, target_ts_name) = resolve_space(&target_space, &target_span)?;

    let lowered_source = lower_cterm(&raw_source, &source_ts)?;
    // when both spaces share one type system, target annotations keep extending it
    let target_ts_in = if source_ts_name == target_ts_name {
        lowered_source.type_system.clone()
    } else {
        target_ts
    };
    let lowered_target = lower_cterm(&raw_target, &target_ts_in)?;

    let antecedents = raw_antecedents
        .iter()
        .map(|r| {
            lower_rel(
                r,
                &lowered_source.construction,
                &lowered_target.construction,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let consequent = lower_rel(
        &raw_consequent,
        &lowered_source.construction,
        &lowered_target.construction,
    )?;

    let schema = build_schema(
        &name,
        (&source_cs, &lowered_source.type_system),
        (&target_cs, &lowered_target.type_system),
        lowered_source.construction,
        lowered_target.construction,
        antecedents,
        consequent,
    )
    .map_err(|e| vec![Diagnostic::new(name_span.clone(), e.to_string())])?;

    if source_ts_name == target_ts_name {
        *doc.type_system_mut(&source_ts_name)
            .expect("resolved above") = lowered_target.type_system;
    } else {
        *doc.type_system_mut(&source_ts_name)
            .expect("resolved above") = lowered_source.type_system;
        *doc.type_system_mut(&target_ts_name)
            .expect("resolved above") = lowered_target.type_system;
    }
    doc.declarations.push(Declaration::Schema(schema));
    Ok(())
}
