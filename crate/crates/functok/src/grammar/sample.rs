//! Randomized response-AST generation for property tests.

use super::{ArgValue, CallExpr, Response};
use crate::registry::{FunctionalToken, Registry};
use rand::Rng;

/// Generates a random well-formed response over `registry`, nested at most
/// `max_depth` deep with at most `max_arity` arguments per call.
pub fn response<R: Rng>(
    rng: &mut R,
    registry: &Registry,
    max_depth: usize,
    max_arity: usize,
) -> Response {
    let n_calls = match rng.gen_range(0..10) {
        0..=6 => 1,
        7..=8 => 2,
        _ => 3,
    };
    Response {
        calls: (0..n_calls)
            .map(|_| call(rng, registry, max_depth, max_arity))
            .collect(),
        terminated: true,
    }
}

fn call<R: Rng>(rng: &mut R, registry: &Registry, depth: usize, max_arity: usize) -> CallExpr {
    let index = rng.gen_range(0..registry.len());
    let function = registry.spec_at(index).unwrap().name.clone();
    let n_args = rng.gen_range(0..=max_arity);
    let n_named = if n_args > 0 { rng.gen_range(0..=n_args.min(2)) } else { 0 };
    let positional = (0..n_args - n_named)
        .map(|_| value(rng, registry, depth, max_arity))
        .collect();
    let mut names = Vec::new();
    while names.len() < n_named {
        let name = format!("p{}", rng.gen_range(0..30));
        if !names.contains(&name) {
            names.push(name);
        }
    }
    let named = names
        .into_iter()
        .map(|n| (n, value(rng, registry, depth, max_arity)))
        .collect();
    CallExpr {
        token: FunctionalToken::Bound { index, function },
        positional,
        named,
    }
}

fn value<R: Rng>(rng: &mut R, registry: &Registry, depth: usize, max_arity: usize) -> ArgValue {
    let max = if depth > 0 { 8 } else { 6 };
    match rng.gen_range(0..=max) {
        0 => ArgValue::Str(random_string(rng)),
        1 => ArgValue::Int(rng.gen_range(-10_000..10_000)),
        2 => ArgValue::Float(rng.gen_range(-8_000..8_000) as f64 / 8.0),
        3 => ArgValue::Bool(rng.gen()),
        4 => ArgValue::Null,
        5 | 6 => ArgValue::List(
            (0..rng.gen_range(0..4))
                .map(|_| scalar(rng))
                .collect(),
        ),
        _ => ArgValue::Nested(Box::new(call(rng, registry, depth - 1, max_arity.min(3)))),
    }
}

fn scalar<R: Rng>(rng: &mut R) -> ArgValue {
    match rng.gen_range(0..3) {
        0 => ArgValue::Str(random_string(rng)),
        1 => ArgValue::Int(rng.gen_range(-1000..1000)),
        _ => ArgValue::Bool(rng.gen()),
    }
}

fn random_string<R: Rng>(rng: &mut R) -> String {
    let len = rng.gen_range(0..12);
    (0..len)
        .map(|_| match rng.gen_range(0..12) {
            0 => '"',
            1 => '\\',
            2 => '\'',
            3 => '\n',
            4 => '\t',
            5 => rng.gen_range('\u{a1}'..'\u{3ff}'),
            _ => rng.gen_range(' '..'~'),
        })
        .collect()
}
