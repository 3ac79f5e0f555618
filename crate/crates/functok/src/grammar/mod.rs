//! Response grammar: parse, render, validate, canonicalize.
//!
//! A response is one or more `;`-separated calls, each a functional token with
//! Python-styled arguments, optionally terminated by `<nexa_end>`. A missing
//! terminator parses fine (`terminated = false`); strict benchmark mode counts
//! it as a format defect.

mod parse;
pub mod sample;

use crate::registry::{FunctionSpec, FunctionalToken, Literal, ParamKind, Registry};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Parse errors; all carry a byte position into the response string.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("syntax error at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },
    #[error("unknown functional token `{surface}` at byte {pos}")]
    UnknownTokenSurface { pos: usize, surface: String },
    #[error("trailing text after <nexa_end> at byte {pos}")]
    TrailingGarbage { pos: usize },
}

/// One argument value. Strings store unescaped content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ArgValue {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    Null,
    List(Vec<ArgValue>),
    Nested(Box<CallExpr>),
}

impl ArgValue {
    fn kind_name(&self) -> &'static str {
        match self {
            ArgValue::Str(_) => "string",
            ArgValue::Int(_) => "integer",
            ArgValue::Float(_) => "float",
            ArgValue::Bool(_) => "boolean",
            ArgValue::Null => "null",
            ArgValue::List(_) => "list",
            ArgValue::Nested(_) => "nested-call",
        }
    }

    pub fn from_literal(lit: &Literal) -> ArgValue {
        match lit {
            Literal::Str(s) => ArgValue::Str(s.clone()),
            Literal::Int(v) => ArgValue::Int(*v),
            Literal::Float(v) => ArgValue::Float(*v),
            Literal::Bool(b) => ArgValue::Bool(*b),
        }
    }
}

/// A single call: bound token plus positional and named arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallExpr {
    pub token: FunctionalToken,
    pub positional: Vec<ArgValue>,
    pub named: Vec<(String, ArgValue)>,
}

impl CallExpr {
    pub fn token_index(&self) -> usize {
        self.token.index().expect("call tokens are always bound")
    }
}

/// A parsed response: non-empty call list plus terminator flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub calls: Vec<CallExpr>,
    pub terminated: bool,
}

/// Parses a response string against a registry.
pub fn parse_response(text: &str, registry: &Registry) -> Result<Response, GrammarError> {
    parse::Parser::new(text, registry).parse_response()
}

/// Canonical rendering: `", "` after commas, bare `;` between parallel calls,
/// double-quoted strings, always `<nexa_end>`-terminated.
pub fn render(response: &Response) -> String {
    let mut out = String::new();
    for (i, call) in response.calls.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        render_call(call, &mut out);
    }
    out.push_str("<nexa_end>");
    out
}

fn render_call(call: &CallExpr, out: &mut String) {
    out.push_str(&call.token.surface());
    out.push('(');
    let mut first = true;
    for v in &call.positional {
        if !first {
            out.push_str(", ");
        }
        first = false;
        render_value(v, out);
    }
    for (name, v) in &call.named {
        if !first {
            out.push_str(", ");
        }
        first = false;
        out.push_str(name);
        out.push('=');
        render_value(v, out);
    }
    out.push(')');
}

fn render_value(v: &ArgValue, out: &mut String) {
    match v {
        ArgValue::Str(s) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '\\' => out.push_str("\\\\"),
                    '"' => out.push_str("\\\""),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    '\r' => out.push_str("\\r"),
                    _ => out.push(c),
                }
            }
            out.push('"');
        }
        ArgValue::Int(i) => out.push_str(&i.to_string()),
        ArgValue::Float(f) => out.push_str(&format!("{f:?}")),
        ArgValue::Bool(true) => out.push_str("True"),
        ArgValue::Bool(false) => out.push_str("False"),
        ArgValue::Null => out.push_str("None"),
        ArgValue::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_value(item, out);
            }
            out.push(']');
        }
        ArgValue::Nested(call) => render_call(call, out),
    }
}

/// One validation defect. Violations are report entries, not errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Violation {
    MissingRequired { param: String },
    UnknownNamed { param: String },
    ArityExceeded { max: usize, got: usize },
    DuplicateBinding { param: String },
    TypeMismatch { param: String, expected: ParamKind, found: String },
    EnumViolation { param: String, value: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingRequired { param } => write!(f, "missing required `{param}`"),
            Violation::UnknownNamed { param } => write!(f, "unknown named argument `{param}`"),
            Violation::ArityExceeded { max, got } => {
                write!(f, "too many positional arguments ({got} > {max})")
            }
            Violation::DuplicateBinding { param } => write!(f, "`{param}` bound twice"),
            Violation::TypeMismatch {
                param,
                expected,
                found,
            } => write!(f, "`{param}` expects {expected}, found {found}"),
            Violation::EnumViolation { param, value } => {
                write!(f, "`{param}` does not allow '{value}'")
            }
        }
    }
}

/// Validation outcome; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Binds arguments to parameters. Positional args bind in declaration order;
/// named binding wins on conflict (the conflict itself is a violation).
fn bind_args<'c>(
    call: &'c CallExpr,
    spec: &FunctionSpec,
    report: &mut ValidationReport,
) -> HashMap<String, &'c ArgValue> {
    let mut bound: HashMap<String, &ArgValue> = HashMap::new();
    if call.positional.len() > spec.params.len() {
        report.violations.push(Violation::ArityExceeded {
            max: spec.params.len(),
            got: call.positional.len(),
        });
    }
    for (i, v) in call.positional.iter().enumerate() {
        if let Some(p) = spec.params.get(i) {
            bound.insert(p.name.clone(), v);
        }
    }
    for (name, v) in &call.named {
        if !spec.params.iter().any(|p| &p.name == name) {
            report
                .violations
                .push(Violation::UnknownNamed { param: name.clone() });
            continue;
        }
        if bound.insert(name.clone(), v).is_some() {
            report
                .violations
                .push(Violation::DuplicateBinding { param: name.clone() });
        }
    }
    // explicit None reads as "not provided"
    bound.retain(|_, v| !matches!(v, ArgValue::Null));
    bound
}

/// Validates one call against its spec. Nested calls match any parameter kind;
/// use [`validate_response`] to also check them against their own specs.
pub fn validate(call: &CallExpr, spec: &FunctionSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let bound = bind_args(call, spec, &mut report);
    for p in &spec.params {
        match bound.get(&p.name) {
            None => {
                if p.required {
                    report
                        .violations
                        .push(Violation::MissingRequired { param: p.name.clone() });
                }
            }
            Some(v) => check_type(p.name.as_str(), p.kind, &p.enum_values, v, &mut report),
        }
    }
    report
}

fn check_type(
    param: &str,
    kind: ParamKind,
    enum_values: &[String],
    v: &ArgValue,
    report: &mut ValidationReport,
) {
    let mismatch = |report: &mut ValidationReport, v: &ArgValue| {
        report.violations.push(Violation::TypeMismatch {
            param: param.into(),
            expected: kind,
            found: v.kind_name().into(),
        });
    };
    match (kind, v) {
        (_, ArgValue::Nested(_)) => {} // output type of a nested call is unknown
        (ParamKind::String, ArgValue::Str(_)) => {}
        (ParamKind::Integer, ArgValue::Int(_)) => {}
        (ParamKind::Float, ArgValue::Float(_) | ArgValue::Int(_)) => {}
        (ParamKind::Boolean, ArgValue::Bool(_)) => {}
        (ParamKind::Enum, ArgValue::Str(s)) => {
            if !enum_values.iter().any(|e| e == s) {
                report.violations.push(Violation::EnumViolation {
                    param: param.into(),
                    value: s.clone(),
                });
            }
        }
        (ParamKind::StringList, ArgValue::List(items)) => {
            if !items.iter().all(|i| matches!(i, ArgValue::Str(_))) {
                mismatch(report, v);
            }
        }
        _ => mismatch(report, v),
    }
}

/// Validates every call in a response, recursing into nested-call arguments.
pub fn validate_response(response: &Response, registry: &Registry) -> ValidationReport {
    let mut report = ValidationReport::default();
    for call in &response.calls {
        collect_call_violations(call, registry, &mut report);
    }
    report
}

fn collect_call_violations(call: &CallExpr, registry: &Registry, report: &mut ValidationReport) {
    if let Some(spec) = registry.spec_at(call.token_index()) {
        let r = validate(call, spec);
        report.violations.extend(r.violations);
    }
    let nested_of = |v: &ArgValue, report: &mut ValidationReport| {
        if let ArgValue::Nested(inner) = v {
            collect_call_violations(inner, registry, report);
        }
    };
    for v in call.positional.iter().chain(call.named.iter().map(|(_, v)| v)) {
        if let ArgValue::List(items) = v {
            for item in items {
                nested_of(item, report);
            }
        }
        nested_of(v, report);
    }
}

/// Canonical form: named args resolved to positional order, defaults filled,
/// explicit `None` dropped, always terminated. Calls that cannot be bound
/// cleanly (unknown names, arity overflow) are left as-is.
pub fn canonicalize(response: &Response, registry: &Registry) -> Response {
    Response {
        calls: response
            .calls
            .iter()
            .map(|c| canonicalize_call(c, registry))
            .collect(),
        terminated: true,
    }
}

fn canonicalize_value(v: &ArgValue, registry: &Registry) -> ArgValue {
    match v {
        ArgValue::Nested(call) => ArgValue::Nested(Box::new(canonicalize_call(call, registry))),
        ArgValue::List(items) => ArgValue::List(
            items
                .iter()
                .map(|i| canonicalize_value(i, registry))
                .collect(),
        ),
        other => other.clone(),
    }
}

fn canonicalize_call(call: &CallExpr, registry: &Registry) -> CallExpr {
    let recursed = CallExpr {
        token: call.token.clone(),
        positional: call
            .positional
            .iter()
            .map(|v| canonicalize_value(v, registry))
            .collect(),
        named: call
            .named
            .iter()
            .map(|(n, v)| (n.clone(), canonicalize_value(v, registry)))
            .collect(),
    };
    let Some(spec) = registry.spec_at(recursed.token_index()) else {
        return recursed;
    };
    let mut report = ValidationReport::default();
    let bound = bind_args(&recursed, spec, &mut report);
    let bindable = !report.violations.iter().any(|v| {
        matches!(
            v,
            Violation::ArityExceeded { .. } | Violation::UnknownNamed { .. }
        )
    });
    if !bindable {
        return recursed;
    }
    // value per param: bound argument, else declared default
    let values: Vec<Option<ArgValue>> = spec
        .params
        .iter()
        .map(|p| {
            bound
                .get(&p.name)
                .map(|v| (*v).clone())
                .or_else(|| p.default.as_ref().map(ArgValue::from_literal))
        })
        .collect();
    let prefix = values.iter().take_while(|v| v.is_some()).count();
    let positional: Vec<ArgValue> = values[..prefix]
        .iter()
        .map(|v| v.clone().unwrap())
        .collect();
    let named: Vec<(String, ArgValue)> = spec.params[prefix..]
        .iter()
        .zip(&values[prefix..])
        .filter_map(|(p, v)| v.clone().map(|v| (p.name.clone(), v)))
        .collect();
    CallExpr {
        token: recursed.token,
        positional,
        named,
    }
}

/// Benchmark exact-match comparison: structural equality after
/// canonicalization, ignoring the terminator flag.
pub fn canonical_equal(a: &Response, b: &Response, registry: &Registry) -> bool {
    canonicalize(a, registry).calls == canonicalize(b, registry).calls
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Registry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reg() -> Registry {
        Registry::builtin()
    }

    #[test]
    fn parse_single_call() {
        let r = reg();
        let resp = parse_response("<nexa_0>(\"back\", \"1080p\")<nexa_end>", &r).unwrap();
        assert_eq!(resp.calls.len(), 1);
        assert!(resp.terminated);
        let call = &resp.calls[0];
        assert_eq!(call.token_index(), 0);
        assert_eq!(
            call.positional,
            vec![ArgValue::Str("back".into()), ArgValue::Str("1080p".into())]
        );
    }

    #[test]
    fn parse_parallel_calls() {
        let r = reg();
        let resp = parse_response("<nexa_3>();<nexa_5>(\"news\")<nexa_end>", &r).unwrap();
        assert_eq!(resp.calls.len(), 2);
        assert!(resp.terminated);
    }

    #[test]
    fn parse_nested_call() {
        let r = reg();
        let resp = parse_response("<nexa_1>(<nexa_2>(\"Paris\", 3))<nexa_end>", &r).unwrap();
        assert_eq!(resp.calls.len(), 1);
        match &resp.calls[0].positional[0] {
            ArgValue::Nested(inner) => {
                assert_eq!(inner.token_index(), 2);
                assert_eq!(inner.positional.len(), 2);
            }
            other => panic!("expected nested call, got {other:?}"),
        }
    }

    #[test]
    fn missing_terminator_tolerated() {
        let r = reg();
        let resp = parse_response("<nexa_7>()", &r).unwrap();
        assert!(!resp.terminated);
    }

    #[test]
    fn unknown_token_surface() {
        let r = reg();
        assert!(matches!(
            parse_response("<nexa_99>()<nexa_end>", &r),
            Err(GrammarError::UnknownTokenSurface { .. })
        ));
    }

    #[test]
    fn trailing_garbage() {
        let r = reg();
        assert!(matches!(
            parse_response("<nexa_0>()<nexa_end> extra", &r),
            Err(GrammarError::TrailingGarbage { .. })
        ));
    }

    #[test]
    fn syntax_error_position() {
        let r = reg();
        match parse_response("<nexa_0>(,)<nexa_end>", &r) {
            Err(GrammarError::Syntax { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn render_canonical_fixed_point() {
        let r = reg();
        for s in [
            "<nexa_0>(\"back\", \"1080p\")<nexa_end>",
            "<nexa_7>()<nexa_end>",
            "<nexa_3>();<nexa_5>(\"news\")<nexa_end>",
            "<nexa_1>(<nexa_2>(\"Paris\", 3))<nexa_end>",
            "<nexa_10>(\"a@b.com\", \"hi\", \"text\", [\"x.pdf\", \"y.pdf\"])<nexa_end>",
        ] {
            let resp = parse_response(s, &r).unwrap();
            assert_eq!(render(&resp), s);
        }
    }

    #[test]
    fn validate_enum_violation() {
        let r = reg();
        let resp = parse_response("<nexa_0>(\"back\", \"8K\")<nexa_end>", &r).unwrap();
        let spec = r.lookup_name("take_a_photo").unwrap();
        let report = validate(&resp.calls[0], spec);
        assert_eq!(
            report.violations,
            vec![Violation::EnumViolation {
                param: "resolution".into(),
                value: "8K".into()
            }]
        );
    }

    #[test]
    fn validate_missing_required() {
        let r = reg();
        let idx = r.lookup_name("set_climate_temperature").unwrap();
        let token_idx = r.token_for("set_climate_temperature").unwrap().index().unwrap();
        let resp =
            parse_response(&format!("<nexa_{token_idx}>(\"driver\")<nexa_end>"), &r).unwrap();
        let report = validate(&resp.calls[0], idx);
        assert_eq!(
            report.violations,
            vec![Violation::MissingRequired {
                param: "temperature".into()
            }]
        );
    }

    #[test]
    fn validate_all_optional_empty_call() {
        let r = reg();
        let idx = r.token_for("adjust_volume").unwrap().index().unwrap();
        let resp = parse_response(&format!("<nexa_{idx}>()<nexa_end>"), &r).unwrap();
        let spec = r.lookup_name("adjust_volume").unwrap();
        assert!(validate(&resp.calls[0], spec).is_valid());
    }

    #[test]
    fn canonical_equal_fills_defaults_and_resolves_named() {
        let r = reg();
        let a = parse_response("<nexa_0>(camera=\"back\")", &r).unwrap();
        let b = parse_response("<nexa_0>(\"back\", \"1080p\")<nexa_end>", &r).unwrap();
        assert!(canonical_equal(&a, &b, &r));
    }

    #[test]
    fn canonical_equal_reflexive_and_token_sensitive() {
        let r = reg();
        let a = parse_response("<nexa_0>()<nexa_end>", &r).unwrap();
        let b = parse_response("<nexa_1>()<nexa_end>", &r).unwrap();
        assert!(canonical_equal(&a, &a, &r));
        assert!(!canonical_equal(&a, &b, &r));
    }

    #[test]
    fn canonicalize_is_idempotent_on_random_asts() {
        let r = reg();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let resp = sample::response(&mut rng, &r, 3, 6);
            let once = canonicalize(&resp, &r);
            let twice = canonicalize(&once, &r);
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn round_trip_random_asts() {
        let r = reg();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for i in 0..2000 {
            let resp = sample::response(&mut rng, &r, 4, 6);
            let text = render(&resp);
            let back = parse_response(&text, &r)
                .unwrap_or_else(|e| panic!("case {i}: {e} in {text}"));
            assert_eq!(back, Response { terminated: true, ..resp }, "case {i}: {text}");
        }
    }

    #[test]
    fn canonical_equal_is_equivalence_on_triples() {
        let r = reg();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let x = sample::response(&mut rng, &r, 2, 4);
            let y = sample::response(&mut rng, &r, 2, 4);
            let z = sample::response(&mut rng, &r, 2, 4);
            // reflexive
            assert!(canonical_equal(&x, &x, &r));
            // symmetric
            assert_eq!(canonical_equal(&x, &y, &r), canonical_equal(&y, &x, &r));
            // transitive
            if canonical_equal(&x, &y, &r) && canonical_equal(&y, &z, &r) {
                assert!(canonical_equal(&x, &z, &r));
            }
        }
    }

    #[test]
    fn violations_cite_known_params() {
        let r = reg();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..500 {
            let resp = sample::response(&mut rng, &r, 2, 8);
            for call in &resp.calls {
                let spec = r.spec_at(call.token_index()).unwrap();
                for v in validate(call, spec).violations {
                    let cited = match &v {
                        Violation::MissingRequired { param }
                        | Violation::TypeMismatch { param, .. }
                        | Violation::EnumViolation { param, .. }
                        | Violation::DuplicateBinding { param } => Some(param.clone()),
                        Violation::UnknownNamed { param } => Some(param.clone()),
                        Violation::ArityExceeded { .. } => None,
                    };
                    if let Some(p) = cited {
                        let in_spec = spec.params.iter().any(|sp| sp.name == p);
                        let in_call = call.named.iter().any(|(n, _)| *n == p);
                        assert!(in_spec || in_call, "dangling param reference {p}");
                    }
                }
            }
        }
    }
}
