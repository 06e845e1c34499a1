//! The subset of the RevLib `.real` format made of `t<k>` gates.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::mct::{MctCircuit, MctGate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unsupported gate `{gate}`")]
    UnsupportedGate { line: usize, gate: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
}

/// Header lines kept verbatim; they do not affect the gate list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealHeader {
    pub version: Option<String>,
    pub inputs: Option<String>,
    pub outputs: Option<String>,
    pub constants: Option<String>,
    pub garbage: Option<String>,
}

pub fn parse_real(bytes: &[u8]) -> Result<MctCircuit, RealError> {
    parse_real_document(bytes).map(|(_, c)| c)
}

pub fn parse_real_document(bytes: &[u8]) -> Result<(RealHeader, MctCircuit), RealError> {
    let text = std::str::from_utf8(bytes).map_err(|e| RealError::Syntax { line: 0, message: e.to_string() })?;
    let mut header = RealHeader::default();
    let mut numvars: Option<(usize, u32)> = None;
    let mut variables: Option<Vec<String>> = None;
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut gates = Vec::new();
    let mut state = Section::Header;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let head = words.next().unwrap_or_default();
        let rest: Vec<&str> = words.collect();
        let syntax = |message: String| RealError::Syntax { line, message };

        match state {
            Section::Header => match head {
                ".numvars" => {
                    let n = rest
                        .first()
                        .and_then(|s| s.parse::<u32>().ok())
                        .filter(|_| rest.len() == 1)
                        .ok_or_else(|| syntax(".numvars expects one integer".into()))?;
                    numvars = Some((line, n));
                }
                ".variables" => variables = Some(rest.iter().map(|s| s.to_string()).collect()),
                ".version" => header.version = Some(rest.join(" ")),
                ".inputs" => header.inputs = Some(rest.join(" ")),
                ".outputs" => header.outputs = Some(rest.join(" ")),
                ".constants" => header.constants = Some(rest.join(" ")),
                ".garbage" => header.garbage = Some(rest.join(" ")),
                ".begin" => {
                    let (_, n) = numvars.ok_or_else(|| syntax(".begin before .numvars".into()))?;
                    let names = variables
                        .take()
                        .unwrap_or_else(|| (0..n).map(|i| format!("x{i}")).collect());
                    if names.len() != n as usize {
                        return Err(RealError::Semantic {
                            line,
                            message: format!(".numvars is {n} but {} variables are declared", names.len()),
                        });
                    }
                    for (k, name) in names.iter().enumerate() {
                        if index.insert(name.clone(), k as u32).is_some() {
                            return Err(RealError::Semantic { line, message: format!("variable `{name}` declared twice") });
                        }
                    }
                    variables = Some(names);
                    state = Section::Body;
                }
                _ if head.starts_with('.') => return Err(syntax(format!("unknown directive `{head}`"))),
                _ => return Err(syntax(format!("`{head}` before .begin"))),
            },
            Section::Body => {
                if head == ".end" {
                    state = Section::Done;
                    continue;
                }
                let arity = head
                    .strip_prefix('t')
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| RealError::UnsupportedGate { line, gate: head.to_string() })?;
                if arity == 0 || rest.len() != arity {
                    return Err(RealError::Semantic {
                        line,
                        message: format!("`{head}` takes {arity} operands, got {}", rest.len()),
                    });
                }
                let mut wires = Vec::with_capacity(arity);
                for name in &rest {
                    let w = index.get(*name).copied().ok_or_else(|| RealError::Semantic {
                        line,
                        message: format!("undeclared variable `{name}`"),
                    })?;
                    wires.push(w);
                }
                let target = wires.pop().expect("arity checked");
                gates.push((line, MctGate::new(wires, target)));
            }
            Section::Done => return Err(syntax("content after .end".into())),
        }
    }

    if state != Section::Done {
        return Err(RealError::Syntax { line: text.lines().count(), message: "missing .end".into() });
    }
    let names = variables.unwrap_or_default();
    let width = names.len() as u32;
    let lines: Vec<usize> = gates.iter().map(|(l, _)| *l).collect();
    let circuit = MctCircuit::new(width, gates.into_iter().map(|(_, g)| g).collect()).map_err(|e| {
        let line = match &e {
            crate::bench::mct::MctError::WireOutOfRange { gate, .. }
            | crate::bench::mct::MctError::TargetIsControl { gate, .. }
            | crate::bench::mct::MctError::RepeatedControl { gate, .. } => lines[*gate],
            _ => 0,
        };
        RealError::Semantic { line, message: e.to_string() }
    })?;
    Ok((header, circuit.with_names(names)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    Body,
    Done,
}
