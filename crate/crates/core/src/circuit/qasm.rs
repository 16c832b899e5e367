//! Reader and writer for the OpenQASM 2 subset understood by the compiler.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::{self, Write as _};

use super::{Circuit, Gate, GateKind, Instruction, Register};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorCode {
    Syntax,
    UnknownGate,
    IndexOutOfBounds,
    DuplicateRegister,
    UndefinedRegister,
    Arity,
}

impl ParseErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseErrorCode::Syntax => "syntax",
            ParseErrorCode::UnknownGate => "unknown_gate",
            ParseErrorCode::IndexOutOfBounds => "index_out_of_bounds",
            ParseErrorCode::DuplicateRegister => "duplicate_register",
            ParseErrorCode::UndefinedRegister => "undefined_register",
            ParseErrorCode::Arity => "arity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {}: {message}", code.as_str())]
pub struct ParseError {
    pub code: ParseErrorCode,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Real(f64),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Int(v) => write!(f, "'{v}'"),
            Tok::Real(v) => write!(f, "'{v}'"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Sym(s) => write!(f, "'{s}'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        code: ParseErrorCode::Syntax,
        line,
        col,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            tokens.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            let mut real = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                real = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    real = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if real {
                Tok::Real(
                    s.parse()
                        .map_err(|_| syntax(tl, tc, format!("malformed number '{s}'")))?,
                )
            } else {
                Tok::Int(
                    s.parse()
                        .map_err(|_| syntax(tl, tc, format!("integer '{s}' too large")))?,
                )
            };
            tokens.push(Token {
                tok,
                line: tl,
                col: tc,
            });
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(syntax(tl, tc, "unterminated string"));
            }
            let s: String = chars[start..i].iter().collect();
            i += 1;
            col += s.chars().count() + 2;
            tokens.push(Token {
                tok: Tok::Str(s),
                line: tl,
                col: tc,
            });
            continue;
        }
        let sym = match c {
            '-' if chars.get(i + 1) == Some(&'>') => "->",
            ';' => ";",
            ',' => ",",
            '[' => "[",
            ']' => "]",
            '(' => "(",
            ')' => ")",
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '/' => "/",
            '^' => "^",
            _ => return Err(syntax(tl, tc, format!("unexpected character '{c}'"))),
        };
        i += sym.len();
        col += sym.len();
        tokens.push(Token {
            tok: Tok::Sym(sym),
            line: tl,
            col: tc,
        });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(tokens)
}

/// A register reference: either one element or the whole register.
#[derive(Clone, Copy)]
struct Arg {
    offset: usize,
    size: usize,
    index: Option<usize>,
    line: usize,
    col: usize,
}

impl Arg {
    fn expand(self, i: usize) -> usize {
        match self.index {
            Some(idx) => self.offset + idx,
            None => self.offset + i,
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    qregs: HashMap<String, (usize, usize)>,
    cregs: HashMap<String, (usize, usize)>,
    circ: Circuit,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<Token, ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Sym(x) if *x == s => Ok(t),
            other => Err(syntax(
                t.line,
                t.col,
                format!("expected '{s}', found {other}"),
            )),
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line, t.col)),
            other => Err(syntax(
                t.line,
                t.col,
                format!("expected identifier, found {other}"),
            )),
        }
    }

    fn expect_int(&mut self) -> Result<(usize, usize, usize), ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Int(v) => usize::try_from(v)
                .map(|v| (v, t.line, t.col))
                .map_err(|_| syntax(t.line, t.col, "integer too large")),
            other => Err(syntax(
                t.line,
                t.col,
                format!("expected integer, found {other}"),
            )),
        }
    }

    fn parse_program(mut self) -> Result<Circuit, ParseError> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "OPENQASM") {
            self.next();
            let t = self.next();
            let ok = match t.tok {
                Tok::Real(v) => (2.0..3.0).contains(&v),
                Tok::Int(v) => v == 2,
                _ => false,
            };
            if !ok {
                return Err(syntax(t.line, t.col, "only OPENQASM 2.x is supported"));
            }
            self.expect_sym(";")?;
        }
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => break,
                Tok::Ident(word) => {
                    let word = word.clone();
                    self.next();
                    match word.as_str() {
                        "include" => {
                            let s = self.next();
                            if !matches!(s.tok, Tok::Str(_)) {
                                return Err(syntax(
                                    s.line,
                                    s.col,
                                    "expected file name string after include",
                                ));
                            }
                            self.expect_sym(";")?;
                        }
                        "qreg" | "creg" => self.parse_decl(word == "qreg")?,
                        "measure" => self.parse_measure()?,
                        "OPENQASM" => {
                            return Err(syntax(t.line, t.col, "version header must come first"))
                        }
                        _ => self.parse_gate(&word, t.line, t.col)?,
                    }
                }
                other => {
                    return Err(syntax(
                        t.line,
                        t.col,
                        format!("expected statement, found {other}"),
                    ))
                }
            }
        }
        Ok(self.circ)
    }

    fn parse_decl(&mut self, quantum: bool) -> Result<(), ParseError> {
        let (name, nl, nc) = self.expect_ident()?;
        self.expect_sym("[")?;
        let (size, sl, sc) = self.expect_int()?;
        self.expect_sym("]")?;
        self.expect_sym(";")?;
        if size == 0 {
            return Err(syntax(sl, sc, "register size must be positive"));
        }
        if self.qregs.contains_key(&name) || self.cregs.contains_key(&name) {
            return Err(ParseError {
                code: ParseErrorCode::DuplicateRegister,
                line: nl,
                col: nc,
                message: format!("register '{name}' already declared"),
            });
        }
        if quantum {
            let offset = self.circ.add_qreg(name.clone(), size);
            self.qregs.insert(name, (offset, size));
        } else {
            let offset = self.circ.add_creg(name.clone(), size);
            self.cregs.insert(name, (offset, size));
        }
        Ok(())
    }

    fn parse_arg(&mut self, quantum: bool) -> Result<Arg, ParseError> {
        let (name, line, col) = self.expect_ident()?;
        let table = if quantum { &self.qregs } else { &self.cregs };
        let Some(&(offset, size)) = table.get(&name) else {
            return Err(ParseError {
                code: ParseErrorCode::UndefinedRegister,
                line,
                col,
                message: format!(
                    "undefined {} register '{name}'",
                    if quantum { "quantum" } else { "classical" }
                ),
            });
        };
        let mut index = None;
        if self.at_sym("[") {
            self.next();
            let (idx, il, ic) = self.expect_int()?;
            self.expect_sym("]")?;
            if idx >= size {
                return Err(ParseError {
                    code: ParseErrorCode::IndexOutOfBounds,
                    line: il,
                    col: ic,
                    message: format!(
                        "index {idx} out of bounds for register '{name}' of size {size}"
                    ),
                });
            }
            index = Some(idx);
        }
        Ok(Arg {
            offset,
            size,
            index,
            line,
            col,
        })
    }

    fn parse_measure(&mut self) -> Result<(), ParseError> {
        let q = self.parse_arg(true)?;
        self.expect_sym("->")?;
        let c = self.parse_arg(false)?;
        self.expect_sym(";")?;
        match (q.index, c.index) {
            (Some(_), Some(_)) => {
                self.circ
                    .instructions
                    .push(Instruction::measure(q.expand(0), c.expand(0)));
            }
            (None, None) if q.size == c.size => {
                for i in 0..q.size {
                    self.circ
                        .instructions
                        .push(Instruction::measure(q.expand(i), c.expand(i)));
                }
            }
            _ => {
                return Err(ParseError {
                    code: ParseErrorCode::Arity,
                    line: q.line,
                    col: q.col,
                    message: "measure operands must both be indexed or be registers of equal size"
                        .into(),
                })
            }
        }
        Ok(())
    }

    fn parse_gate(&mut self, name: &str, line: usize, col: usize) -> Result<(), ParseError> {
        let kind = GateKind::from_name(name);
        let sugar = matches!(name, "u1" | "u2" | "u3");
        if kind.is_none() && !sugar || kind == Some(GateKind::Measure) {
            return Err(ParseError {
                code: ParseErrorCode::UnknownGate,
                line,
                col,
                message: format!("unknown gate '{name}'"),
            });
        }
        let mut params = Vec::new();
        if self.at_sym("(") {
            self.next();
            if !self.at_sym(")") {
                params.push(self.parse_expr()?);
                while self.at_sym(",") {
                    self.next();
                    params.push(self.parse_expr()?);
                }
            }
            self.expect_sym(")")?;
        }
        let mut args = vec![self.parse_arg(true)?];
        while self.at_sym(",") {
            self.next();
            args.push(self.parse_arg(true)?);
        }
        self.expect_sym(";")?;

        let (expected_params, expected_qubits) = match name {
            "u1" => (1, Some(1)),
            "u2" => (2, Some(1)),
            "u3" => (3, Some(1)),
            _ => {
                let k = kind.expect("checked above");
                (k.num_params(), k.num_qubits())
            }
        };
        let arity_err = |message: String| ParseError {
            code: ParseErrorCode::Arity,
            line,
            col,
            message,
        };
        if params.len() != expected_params {
            return Err(arity_err(format!(
                "'{name}' takes {expected_params} parameter(s), got {}",
                params.len()
            )));
        }
        if let Some(n) = expected_qubits {
            if args.len() != n {
                return Err(arity_err(format!(
                    "'{name}' takes {n} qubit argument(s), got {}",
                    args.len()
                )));
            }
        }

        if kind == Some(GateKind::Barrier) {
            let mut qubits = Vec::new();
            for a in &args {
                match a.index {
                    Some(_) => qubits.push(a.expand(0)),
                    None => qubits.extend((0..a.size).map(|i| a.expand(i))),
                }
            }
            self.circ
                .instructions
                .push(Instruction::new(GateKind::Barrier, &qubits));
            return Ok(());
        }

        // Broadcast whole-register arguments per the usual QASM 2 rules.
        let widths: Vec<usize> = args
            .iter()
            .filter(|a| a.index.is_none())
            .map(|a| a.size)
            .collect();
        let reps = match widths.first() {
            None => 1,
            Some(&w) if widths.iter().all(|&x| x == w) => w,
            Some(_) => return Err(arity_err("register arguments of different sizes".into())),
        };
        for rep in 0..reps {
            let qubits: Vec<usize> = args.iter().map(|a| a.expand(rep)).collect();
            let mut seen = qubits.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(arity_err(format!(
                    "'{name}' applied to the same qubit twice"
                )));
            }
            match name {
                "u1" => self.circ.instructions.push(Instruction::rotation(
                    GateKind::Rz,
                    params[0],
                    &qubits,
                )),
                "u2" => self.push_u3(FRAC_PI_2, params[0], params[1], qubits[0]),
                "u3" => self.push_u3(params[0], params[1], params[2], qubits[0]),
                _ => self.circ.instructions.push(Instruction {
                    gate: Gate {
                        kind: kind.expect("checked above"),
                        params: params.clone(),
                    },
                    qubits,
                    clbits: Vec::new(),
                }),
            }
        }
        Ok(())
    }

    /// u3(θ, φ, λ) = Rz(φ)·Ry(θ)·Rz(λ) up to global phase, with Ry(θ) = Rz(π/2)·Rx(θ)·Rz(−π/2).
    fn push_u3(&mut self, theta: f64, phi: f64, lambda: f64, q: usize) {
        let insts = &mut self.circ.instructions;
        insts.push(Instruction::rotation(
            GateKind::Rz,
            lambda - FRAC_PI_2,
            &[q],
        ));
        insts.push(Instruction::rotation(GateKind::Rx, theta, &[q]));
        insts.push(Instruction::rotation(GateKind::Rz, phi + FRAC_PI_2, &[q]));
    }

    fn parse_expr(&mut self) -> Result<f64, ParseError> {
        let mut v = self.parse_term()?;
        loop {
            if self.at_sym("+") {
                self.next();
                v += self.parse_term()?;
            } else if self.at_sym("-") {
                self.next();
                v -= self.parse_term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn parse_term(&mut self) -> Result<f64, ParseError> {
        let mut v = self.parse_unary()?;
        loop {
            if self.at_sym("*") {
                self.next();
                v *= self.parse_unary()?;
            } else if self.at_sym("/") {
                self.next();
                v /= self.parse_unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn parse_unary(&mut self) -> Result<f64, ParseError> {
        if self.at_sym("-") {
            self.next();
            return Ok(-self.parse_unary()?);
        }
        if self.at_sym("+") {
            self.next();
            return self.parse_unary();
        }
        let base = self.parse_primary()?;
        if self.at_sym("^") {
            self.next();
            let exp = self.parse_unary()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn parse_primary(&mut self) -> Result<f64, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Int(v) => Ok(v as f64),
            Tok::Real(v) => Ok(v),
            Tok::Sym("(") => {
                let v = self.parse_expr()?;
                self.expect_sym(")")?;
                Ok(v)
            }
            Tok::Ident(ref s) if s == "pi" => Ok(PI),
            Tok::Ident(ref s) => {
                let f: fn(f64) -> f64 = match s.as_str() {
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "tan" => f64::tan,
                    "exp" => f64::exp,
                    "ln" => f64::ln,
                    "sqrt" => f64::sqrt,
                    _ => {
                        return Err(syntax(
                            t.line,
                            t.col,
                            format!("unknown identifier '{s}' in expression"),
                        ))
                    }
                };
                self.expect_sym("(")?;
                let v = self.parse_expr()?;
                self.expect_sym(")")?;
                Ok(f(v))
            }
            other => Err(syntax(
                t.line,
                t.col,
                format!("expected expression, found {other}"),
            )),
        }
    }
}

/// Parses an OpenQASM 2 program into a [`Circuit`], keeping source order.
pub fn parse_qasm(text: &str) -> Result<Circuit, ParseError> {
    let tokens = lex(text)?;
    let parser = Parser {
        tokens,
        pos: 0,
        qregs: HashMap::new(),
        cregs: HashMap::new(),
        circ: Circuit::default(),
    };
    parser.parse_program()
}

/// Formats an angle with 17 significant digits, `%.17g` style.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    if !(-5..17).contains(&exp) {
        let mut frac = digits[1..].trim_end_matches('0').to_string();
        if !frac.is_empty() {
            frac.insert(0, '.');
        }
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{}{frac}e{esign}{:02}", &digits[..1], exp.abs());
    }
    let body = if exp >= 0 {
        let split = (exp + 1) as usize;
        let (int, frac) = digits.split_at(split);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("0.{zeros}{}", digits.trim_end_matches('0'))
    };
    format!("{sign}{body}")
}

fn qubit_name(regs: &[Register], mut index: usize) -> String {
    for r in regs {
        if index < r.size {
            return format!("{}[{index}]", r.name);
        }
        index -= r.size;
    }
    format!("?[{index}]")
}

/// Emits deterministic QASM text with one instruction per line.
pub fn emit_qasm(circ: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    // Zero-size registers hold no bits and are not valid QASM, so they are dropped.
    for r in circ.qregs.iter().filter(|r| r.size > 0) {
        let _ = writeln!(out, "qreg {}[{}];", r.name, r.size);
    }
    for r in circ.cregs.iter().filter(|r| r.size > 0) {
        let _ = writeln!(out, "creg {}[{}];", r.name, r.size);
    }
    for inst in &circ.instructions {
        let qubits: Vec<String> = inst
            .qubits
            .iter()
            .map(|&q| qubit_name(&circ.qregs, q))
            .collect();
        if inst.kind() == GateKind::Measure {
            let _ = writeln!(
                out,
                "measure {} -> {};",
                qubits[0],
                qubit_name(&circ.cregs, inst.clbits[0])
            );
            continue;
        }
        out.push_str(inst.kind().name());
        if !inst.gate.params.is_empty() {
            let params: Vec<String> = inst.gate.params.iter().map(|&p| format_angle(p)).collect();
            let _ = write!(out, "({})", params.join(","));
        }
        let _ = writeln!(out, " {};", qubits.join(","));
    }
    out
}
