use std::fmt::{self, Write};

/// Source position (1-based). Spans are metadata: they do not take part in
/// equality, so a re-parsed script compares equal to the original.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

/// Dotted reference such as `m`, `t.guard` or `model.Mode`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ref {
    pub path: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Arg {
    Str(String),
    Num(f64),
    Ref(Ref),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Call {
    pub receiver: Ref,
    pub method: String,
    pub args: Vec<Arg>,
    pub span: Span,
}

/// Right-hand side of an assignment.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Ref(Ref),
    Call(Call),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Assign { name: String, value: Value, span: Span },
    Call(Call),
    ForMode { var: String, collection: Ref, body: Vec<Stmt>, span: Span },
    ForTrans { var: String, collection: Ref, body: Vec<Stmt>, span: Span },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Script {
    pub stmts: Vec<Stmt>,
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.path.join("."))
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Str(s) => {
                f.write_char('"')?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => f.write_char(c)?,
                    }
                }
                f.write_char('"')
            }
            Arg::Num(v) => write!(f, "{v}"),
            Arg::Ref(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}(", self.receiver, self.method)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_char(')')
    }
}

fn write_block(out: &mut String, stmts: &[Stmt], depth: usize) {
    let pad = "    ".repeat(depth);
    for s in stmts {
        match s {
            Stmt::Assign { name, value: Value::Ref(r), .. } => {
                let _ = writeln!(out, "{pad}{name} = {r}");
            }
            Stmt::Assign { name, value: Value::Call(c), .. } => {
                let _ = writeln!(out, "{pad}{name} = {c}");
            }
            Stmt::Call(c) => {
                let _ = writeln!(out, "{pad}{c}");
            }
            Stmt::ForMode { var, collection, body, .. } | Stmt::ForTrans { var, collection, body, .. } => {
                let kw = if matches!(s, Stmt::ForMode { .. }) { "formode" } else { "fortran" };
                let _ = writeln!(out, "{pad}{kw} {var} = {collection} {{");
                write_block(out, body, depth + 1);
                let _ = writeln!(out, "{pad}}}");
            }
        }
    }
}

impl Script {
    /// Canonical source text. Comments are not preserved.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        write_block(&mut out, &self.stmts, 0);
        out
    }
}
