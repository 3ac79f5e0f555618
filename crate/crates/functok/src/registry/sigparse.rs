//! Parser for the Python-style signature/docstring corpus format.
//!
//! One definition looks like:
//!
//! ```text
//! def take_a_photo(camera="back", resolution="1080p"):
//!     """
//!     Captures a photo using the specified camera and resolution settings.
//!
//!     Parameters:
//!     - camera (str, optional): Specifies the camera to use. ...
//!
//!     Returns:
//!     - str: The file path of the captured photo.
//!     """
//! ```
//!
//! Parameter kinds come from the docstring type words (`str`, `int`, `float`,
//! `bool`, `enum`, `list of str`); defaults come from the `def` header, where a
//! `None` default means "optional, no default". A bullet whose text lists quoted
//! options after "chosen from" or "Options include" becomes an enum.

use super::{Category, FunctionSpec, Literal, ParamKind, ParamSpec, RegistryError};

/// Parses a single definition in the corpus format.
pub fn parse_signature_source(text: &str) -> Result<FunctionSpec, RegistryError> {
    let defs = parse_fixture_file(text, Category::Other)?;
    match defs.len() {
        1 => Ok(defs.into_iter().next().unwrap().0),
        0 => Err(RegistryError::MalformedSignature {
            line: 1,
            msg: "no `def` found".into(),
        }),
        n => Err(RegistryError::MalformedSignature {
            line: 1,
            msg: format!("expected one definition, found {n}"),
        }),
    }
}

/// Parses every definition in a corpus file, returning each spec with its
/// verbatim source block.
pub fn parse_fixture_file(
    text: &str,
    category: Category,
) -> Result<Vec<(FunctionSpec, String)>, RegistryError> {
    let lines: Vec<&str> = text.lines().collect();
    // block starts: lines beginning with `def `
    let starts: Vec<usize> = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| l.starts_with("def "))
        .map(|(i, _)| i)
        .collect();
    if starts.is_empty() && !text.trim().is_empty() {
        return Err(RegistryError::MalformedSignature {
            line: 1,
            msg: "no `def` found".into(),
        });
    }
    let mut out = Vec::new();
    for (bi, &start) in starts.iter().enumerate() {
        let end = starts.get(bi + 1).copied().unwrap_or(lines.len());
        let block = &lines[start..end];
        let spec = parse_def(block, start + 1, category)?;
        let source = block
            .iter()
            .copied()
            .collect::<Vec<_>>()
            .join("\n")
            .trim_end()
            .to_string();
        out.push((spec, source));
    }
    Ok(out)
}

fn malformed(line: usize, msg: impl Into<String>) -> RegistryError {
    RegistryError::MalformedSignature {
        line,
        msg: msg.into(),
    }
}

/// Header default as parsed; `None` in the header means "no default".
enum HeaderDefault {
    Absent,
    NoneValue,
    Value(Literal),
}

fn parse_def(
    block: &[&str],
    first_line: usize,
    category: Category,
) -> Result<FunctionSpec, RegistryError> {
    let header = block[0];
    let open = header
        .find('(')
        .ok_or_else(|| malformed(first_line, "missing `(` in def header"))?;
    let close = header
        .rfind(')')
        .ok_or_else(|| malformed(first_line, "missing `)` in def header"))?;
    if !header[close..].trim_end().ends_with("):") {
        return Err(malformed(first_line, "def header must end with `):`"));
    }
    let name = header[4..open].trim().to_string();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(malformed(first_line, "bad function name"));
    }
    let params_src = &header[open + 1..close];
    let mut header_params: Vec<(String, HeaderDefault)> = Vec::new();
    for piece in split_top_level(params_src) {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (pname, default) = match piece.split_once('=') {
            None => (piece.to_string(), HeaderDefault::Absent),
            Some((n, v)) => {
                let v = v.trim();
                let d = if v == "None" {
                    HeaderDefault::NoneValue
                } else {
                    HeaderDefault::Value(parse_header_literal(v, first_line)?)
                };
                (n.trim().to_string(), d)
            }
        };
        header_params.push((pname, default));
    }

    // docstring
    let mut i = 1;
    while i < block.len() && block[i].trim().is_empty() {
        i += 1;
    }
    if i >= block.len() || block[i].trim() != "\"\"\"" {
        return Err(malformed(first_line + i, "missing docstring"));
    }
    i += 1;
    let doc_start = i;
    let mut doc_end = None;
    while i < block.len() {
        if block[i].trim() == "\"\"\"" {
            doc_end = Some(i);
            break;
        }
        i += 1;
    }
    let doc_end = doc_end.ok_or_else(|| malformed(first_line + block.len() - 1, "unterminated docstring"))?;

    #[derive(PartialEq)]
    enum Section {
        Description,
        Parameters,
        Note,
        Returns,
    }
    let mut section = Section::Description;
    let mut description: Vec<String> = Vec::new();
    let mut returns: Vec<String> = Vec::new();
    let mut bullets: Vec<(usize, String)> = Vec::new();
    for (off, raw) in block[doc_start..doc_end].iter().enumerate() {
        let lineno = first_line + doc_start + off;
        let line = raw.strip_prefix("    ").unwrap_or(raw).trim_end();
        match line.trim() {
            "Parameters:" => {
                section = Section::Parameters;
                continue;
            }
            "Note:" => {
                section = Section::Note;
                continue;
            }
            "Returns:" => {
                section = Section::Returns;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Description => {
                if !line.trim().is_empty() {
                    description.push(line.trim().to_string());
                }
            }
            Section::Parameters => {
                if line.trim().is_empty() {
                    continue;
                }
                let t = line.trim();
                if let Some(rest) = t.strip_prefix("- ") {
                    bullets.push((lineno, rest.to_string()));
                } else if let Some(last) = bullets.last_mut() {
                    // wrapped bullet continuation
                    last.1.push(' ');
                    last.1.push_str(t);
                } else {
                    return Err(malformed(lineno, "expected `- name (type): ...` bullet"));
                }
            }
            Section::Note => {}
            Section::Returns => {
                if !line.trim().is_empty() {
                    returns.push(line.trim().to_string());
                }
            }
        }
    }

    // fold bullets into a name -> parsed map, preserving order checks
    let mut parsed_bullets: Vec<(String, ParamKind, Vec<String>, bool)> = Vec::new();
    for (lineno, bullet) in &bullets {
        parsed_bullets.push(parse_bullet(bullet, *lineno)?);
    }

    let mut params = Vec::new();
    for (pname, default) in header_params {
        let found = parsed_bullets.iter().find(|(n, ..)| n == &pname);
        let (_, kind, enum_values, optional) = found.ok_or_else(|| {
            malformed(
                first_line,
                format!("param `{pname}` has no docstring bullet"),
            )
        })?;
        let default = match default {
            HeaderDefault::Absent | HeaderDefault::NoneValue => None,
            HeaderDefault::Value(v) => Some(v),
        };
        params.push(ParamSpec {
            name: pname,
            kind: *kind,
            enum_values: enum_values.clone(),
            required: !optional,
            default,
        });
    }
    for (bname, ..) in &parsed_bullets {
        if !params.iter().any(|p| &p.name == bname) {
            return Err(malformed(
                first_line,
                format!("docstring bullet `{bname}` has no header param"),
            ));
        }
    }

    Ok(FunctionSpec {
        name,
        description: description.join(" "),
        params,
        returns_doc: returns.join("\n"),
        category,
    })
}

/// Parses `name (type[, optional]): text`, returning (name, kind, enum values, optional).
fn parse_bullet(
    bullet: &str,
    lineno: usize,
) -> Result<(String, ParamKind, Vec<String>, bool), RegistryError> {
    let open = bullet
        .find('(')
        .ok_or_else(|| malformed(lineno, "bullet missing `(type)`"))?;
    let close = bullet[open..]
        .find(')')
        .map(|c| open + c)
        .ok_or_else(|| malformed(lineno, "bullet missing `)`"))?;
    let name = bullet[..open].trim().to_string();
    let typespec = &bullet[open + 1..close];
    let rest = bullet[close + 1..].trim_start_matches(':').trim();

    let mut optional = false;
    let mut type_word = String::new();
    for (i, part) in typespec.split(',').enumerate() {
        let part = part.trim();
        if i == 0 {
            type_word = part.to_string();
        } else if part.eq_ignore_ascii_case("optional") {
            optional = true;
        }
    }

    let enum_values = extract_enum_values(rest);
    let kind = match type_word.as_str() {
        _ if !enum_values.is_empty() => ParamKind::Enum,
        "str" => ParamKind::String,
        "int" => ParamKind::Integer,
        "float" => ParamKind::Float,
        "bool" => ParamKind::Boolean,
        "list of str" | "list[str]" => ParamKind::StringList,
        "enum" => {
            return Err(malformed(
                lineno,
                format!("enum param `{name}` lists no quoted options"),
            ))
        }
        other => {
            return Err(RegistryError::UnknownTypeWord {
                line: lineno,
                word: other.to_string(),
            })
        }
    };
    let enum_values = if kind == ParamKind::Enum { enum_values } else { vec![] };
    Ok((name, kind, enum_values, optional))
}

/// Quoted options following "chosen from" or "Options include", up to the
/// closing sentence period.
fn extract_enum_values(text: &str) -> Vec<String> {
    let start = ["chosen from", "Options include"]
        .iter()
        .filter_map(|phrase| text.find(phrase).map(|p| p + phrase.len()))
        .min();
    let Some(start) = start else {
        return vec![];
    };
    let window = &text[start..];
    let mut values = Vec::new();
    let mut chars = window.char_indices();
    while let Some((_, c)) = chars.next() {
        match c {
            '\'' => {
                let mut v = String::new();
                for (_, c2) in chars.by_ref() {
                    if c2 == '\'' {
                        break;
                    }
                    v.push(c2);
                }
                values.push(v);
            }
            '.' => break,
            _ => {}
        }
    }
    values
}

fn parse_header_literal(src: &str, line: usize) -> Result<Literal, RegistryError> {
    let src = src.trim();
    if (src.starts_with('\'') && src.ends_with('\'') && src.len() >= 2)
        || (src.starts_with('"') && src.ends_with('"') && src.len() >= 2)
    {
        return Ok(Literal::Str(src[1..src.len() - 1].to_string()));
    }
    match src {
        "True" => return Ok(Literal::Bool(true)),
        "False" => return Ok(Literal::Bool(false)),
        _ => {}
    }
    if let Ok(v) = src.parse::<i64>() {
        return Ok(Literal::Int(v));
    }
    if let Ok(v) = src.parse::<f64>() {
        return Ok(Literal::Float(v));
    }
    Err(malformed(line, format!("bad default literal `{src}`")))
}

/// Splits a header parameter list on top-level commas (quotes respected).
fn split_top_level(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    for c in src.chars() {
        match quote {
            Some(q) => {
                cur.push(c);
                if c == q {
                    quote = None;
                }
            }
            None => match c {
                '\'' | '"' => {
                    quote = Some(c);
                    cur.push(c);
                }
                ',' => {
                    out.push(std::mem::take(&mut cur));
                }
                _ => cur.push(c),
            },
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

/// Renders a spec back to the corpus source format. Re-parsing the result
/// recovers a structurally equal spec (category aside).
pub fn render_signature_source(spec: &FunctionSpec) -> String {
    let mut header_parts = Vec::new();
    for p in &spec.params {
        match &p.default {
            Some(Literal::Str(s)) => header_parts.push(format!("{}='{}'", p.name, s)),
            Some(Literal::Int(v)) => header_parts.push(format!("{}={}", p.name, v)),
            Some(Literal::Float(v)) => header_parts.push(format!("{}={:?}", p.name, v)),
            Some(Literal::Bool(b)) => {
                header_parts.push(format!("{}={}", p.name, if *b { "True" } else { "False" }))
            }
            None if p.required => header_parts.push(p.name.clone()),
            None => header_parts.push(format!("{}=None", p.name)),
        }
    }
    let mut out = format!("def {}({}):\n    \"\"\"\n", spec.name, header_parts.join(", "));
    out.push_str(&format!("    {}\n", spec.description));
    if !spec.params.is_empty() {
        out.push_str("\n    Parameters:\n");
        for p in &spec.params {
            let type_word = match p.kind {
                ParamKind::String => "str",
                ParamKind::Integer => "int",
                ParamKind::Float => "float",
                ParamKind::Boolean => "bool",
                ParamKind::StringList => "list of str",
                ParamKind::Enum => "enum",
            };
            let marker = if p.required { String::new() } else { ", optional".into() };
            let mut text = format!("The {} parameter", p.name);
            if p.kind == ParamKind::Enum {
                let opts = p
                    .enum_values
                    .iter()
                    .map(|v| format!("'{v}'"))
                    .collect::<Vec<_>>()
                    .join(", ");
                text = format!("One value chosen from {opts}");
            }
            out.push_str(&format!("    - {} ({type_word}{marker}): {text}.\n", p.name));
        }
    }
    out.push_str("\n    Returns:\n");
    for line in spec.returns_doc.lines() {
        out.push_str(&format!("    {line}\n"));
    }
    out.push_str("    \"\"\"\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Registry;

    #[test]
    fn take_a_photo_params() {
        let reg = Registry::builtin();
        let spec = reg.lookup_name("take_a_photo").unwrap();
        assert_eq!(spec.params.len(), 2);
        let camera = &spec.params[0];
        // "Can be 'front' or 'back'" does not promote to enum
        assert_eq!(camera.kind, ParamKind::String);
        assert!(!camera.required);
        assert_eq!(camera.default, Some(Literal::Str("back".into())));
        let resolution = &spec.params[1];
        assert_eq!(resolution.kind, ParamKind::Enum);
        assert_eq!(resolution.enum_values, vec!["720p", "1080p", "4K"]);
        assert_eq!(resolution.default, Some(Literal::Str("1080p".into())));
    }

    #[test]
    fn adjust_volume_params_optional_no_defaults() {
        let reg = Registry::builtin();
        let spec = reg.lookup_name("adjust_volume").unwrap();
        assert_eq!(spec.params.len(), 2);
        for p in &spec.params {
            assert_eq!(p.kind, ParamKind::Integer);
            assert!(!p.required);
            assert!(p.default.is_none());
        }
    }

    #[test]
    fn search_filter_is_enum() {
        let reg = Registry::builtin();
        let spec = reg.lookup_name("search_youtube_videos").unwrap();
        let f = &spec.params[2];
        assert_eq!(f.kind, ParamKind::Enum);
        assert_eq!(
            f.enum_values,
            vec!["Relevance", "Upload date", "View Count", "Rating"]
        );
    }

    #[test]
    fn send_email_list_params() {
        let reg = Registry::builtin();
        let spec = reg.lookup_name("send_email").unwrap();
        assert_eq!(spec.params[3].kind, ParamKind::StringList);
        assert!(spec.params[0].required && spec.params[1].required && spec.params[2].required);
        assert_eq!(spec.returns_doc, "");
    }

    #[test]
    fn missing_docstring_is_malformed() {
        let err = parse_signature_source("def f(a):\n").unwrap_err();
        assert!(matches!(err, RegistryError::MalformedSignature { .. }));
    }

    #[test]
    fn unknown_type_word() {
        let src = "def f(a):\n    \"\"\"\n    Does f.\n\n    Parameters:\n    - a (widget): A widget.\n\n    Returns:\n    - bool: ok.\n    \"\"\"\n";
        assert!(matches!(
            parse_signature_source(src),
            Err(RegistryError::UnknownTypeWord { .. })
        ));
    }

    #[test]
    fn all_fixture_defs_parse() {
        // totality over the shipped corpus
        let reg = Registry::builtin();
        assert_eq!(reg.len(), 21);
    }

    #[test]
    fn render_parse_round_trip() {
        let reg = Registry::builtin();
        for spec in reg.specs() {
            let rendered = render_signature_source(spec);
            let reparsed = parse_signature_source(&rendered)
                .unwrap_or_else(|e| panic!("{} failed to re-parse: {e}\n{rendered}", spec.name));
            let mut want = spec.clone();
            want.category = Category::Other;
            assert_eq!(reparsed, want, "round trip mismatch for {}", spec.name);
        }
    }
}
