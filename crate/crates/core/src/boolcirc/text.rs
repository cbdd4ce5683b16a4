//! Line-oriented circuit description.
//!
//! ```text
//! # comment
//! weights 4
//! inputs 9
//! XOR t0 <- w0 x0
//! AND r0 <- !t0 !t1 !t2
//! ADD s c <- a b r0
//! outputs o
//! ```
//!
//! - `weights N` and `inputs N` come first, in that order. They declare wires
//!   `w0..w{N-1}` and `x0..x{N-1}`.
//! - A gate line is `MNEMONIC out.. <- in..` with one of `NOT`, `XOR`, `AND`, `OR`,
//!   `COPY`, `ADD`. `ADD` writes two wires, sum then carry, and takes two or three
//!   inputs. Every other gate writes one wire.
//! - Inputs may be prefixed with `!` to complement them.
//! - Each wire name is assigned once and must be defined before it is read.
//! - The last line is `outputs name..`, listing ŷ from digit 0 upwards.
//! - Blank lines and text after `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{CircuitBuilder, Lit, ModelCircuit, Op};
use crate::{Error, Result};

pub fn write_circuit(c: &ModelCircuit) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "weights {}", c.weight_width());
    let _ = writeln!(s, "inputs {}", c.input_width());
    let lit = |l: &Lit| {
        let name = c.wire_name(l.wire);
        if l.negated {
            format!("!{name}")
        } else {
            name.to_string()
        }
    };
    for g in c.gates() {
        let outs: Vec<&str> = g.outputs.iter().map(|&o| c.wire_name(o)).collect();
        let ins: Vec<String> = g.inputs.iter().map(lit).collect();
        let _ = writeln!(s, "{} {} <- {}", g.op.mnemonic(), outs.join(" "), ins.join(" "));
    }
    let outs: Vec<&str> = c.outputs().iter().map(|&o| c.wire_name(o)).collect();
    let _ = writeln!(s, "outputs {}", outs.join(" "));
    s
}

pub fn parse_circuit(text: &str) -> Result<ModelCircuit> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, msg: String| Error::CircuitSyntax { line, msg };

    let mut header = |key: &str| -> Result<usize> {
        let (line, l) = lines.next().ok_or_else(|| err(0, format!("missing `{key}` header")))?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(err(line, format!("expected `{key} N`")));
        }
        let n = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| err(line, format!("`{key}` needs a width")))?;
        if parts.next().is_some() {
            return Err(err(line, "trailing tokens".into()));
        }
        Ok(n)
    };
    let dw = header("weights")?;
    let dx = header("inputs")?;

    let mut b = CircuitBuilder::new(dw, dx);
    let mut wires: HashMap<String, usize> = b
        .names()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i))
        .collect();
    let mut outputs = None;
    for (line, l) in lines {
        if outputs.is_some() {
            return Err(err(line, "nothing may follow `outputs`".into()));
        }
        let mut tokens = l.split_whitespace();
        let head = tokens.next().unwrap_or_default();
        if head == "outputs" {
            let outs = tokens
                .map(|t| wires.get(t).map(|&w| Lit::pos(w)).ok_or_else(|| err(line, format!("unknown wire `{t}`"))))
                .collect::<Result<Vec<_>>>()?;
            outputs = Some(outs);
            continue;
        }
        let op = match head {
            "NOT" => Op::Not,
            "XOR" => Op::Xor,
            "AND" => Op::And,
            "OR" => Op::Or,
            "COPY" => Op::Copy,
            "ADD" => Op::Add,
            other => return Err(Error::UnsupportedGate(format!("`{other}` at line {line}"))),
        };
        let rest: Vec<&str> = tokens.collect();
        let arrow = rest
            .iter()
            .position(|&t| t == "<-")
            .ok_or_else(|| err(line, "missing `<-`".into()))?;
        let (outs, ins) = (&rest[..arrow], &rest[arrow + 1..]);
        for name in outs {
            if wires.contains_key(*name) {
                return Err(err(line, format!("wire `{name}` assigned twice")));
            }
            if !is_identifier(name) {
                return Err(err(line, format!("bad wire name `{name}`")));
            }
        }
        let inputs = ins
            .iter()
            .map(|t| {
                let (negated, name) = match t.strip_prefix('!') {
                    Some(n) => (true, n),
                    None => (false, *t),
                };
                wires
                    .get(name)
                    .map(|&wire| Lit { wire, negated })
                    .ok_or_else(|| err(line, format!("wire `{name}` read before it is defined")))
            })
            .collect::<Result<Vec<_>>>()?;
        let produced = b
            .try_push(op, inputs, Some(outs.iter().map(|s| s.to_string()).collect()))
            .map_err(|m| err(line, m))?;
        for (name, l) in outs.iter().zip(produced) {
            wires.insert(name.to_string(), l.wire);
        }
    }
    let outputs = outputs.ok_or_else(|| err(0, "missing `outputs` line".into()))?;
    b.build(&outputs)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
