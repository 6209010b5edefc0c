//! Arithmetic expressions over point coordinates.
//!
//! Variables: `x0, x1, ...` (coordinates), `x` (alias of `x0`), `i` (point
//! index), `m` (mass), `s` (Riemann-sum variable). Functions: `abs`, `sqrt`,
//! `exp`, `ln`, `sin`, `cos`, `min`, `max`, `floor`, and the `math::` set of
//! the expression engine. `^` is exponentiation.

use evalexpr::{
    build_operator_tree, ContextWithMutableFunctions, ContextWithMutableVariables, EvalexprError, Function,
    HashMapContext, Node, Value,
};

use crate::error::{CliError, CliResult};

pub struct Expr {
    source: String,
    tree: Node,
    ctx: HashMapContext,
}

fn unary(f: fn(f64) -> f64) -> Function {
    Function::new(move |arg| Ok(Value::Float(f(arg.as_number()?))))
}

impl Expr {
    pub fn parse(source: &str) -> CliResult<Self> {
        // Integer literals would make `1/2` integer division; promote them.
        let promoted = promote_integers(source);
        let tree = build_operator_tree(&promoted)
            .map_err(|e| CliError::ConfigParse(format!("bad expression {source:?}: {e}")))?;
        let mut ctx = HashMapContext::new();
        let fns: [(&str, fn(f64) -> f64); 7] =
            [("abs", f64::abs), ("sqrt", f64::sqrt), ("exp", f64::exp), ("ln", f64::ln), ("sin", f64::sin), ("cos", f64::cos), ("floor", f64::floor)];
        for (name, f) in fns {
            ctx.set_function(name.into(), unary(f)).map_err(|e| CliError::ConfigParse(e.to_string()))?;
        }
        Ok(Expr { source: source.to_string(), tree, ctx })
    }

    pub fn eval(&mut self, vars: &[(&str, f64)]) -> CliResult<f64> {
        for (k, v) in vars {
            self.ctx.set_value((*k).into(), Value::Float(*v)).map_err(|e| self.err(e))?;
        }
        let v = self.tree.eval_number_with_context(&self.ctx).map_err(|e| self.err(e))?;
        Ok(v)
    }

    /// Values at each point of a space.
    pub fn eval_points(&mut self, coords: &[Vec<f64>], masses: &[f64]) -> CliResult<Vec<f64>> {
        let mut out = Vec::with_capacity(masses.len());
        for (i, m) in masses.iter().enumerate() {
            let mut vars: Vec<(String, f64)> = vec![("i".into(), i as f64), ("m".into(), *m)];
            if let Some(c) = coords.get(i) {
                if let Some(&x) = c.first() {
                    vars.push(("x".into(), x));
                }
                for (k, &x) in c.iter().enumerate() {
                    vars.push((format!("x{k}"), x));
                }
            }
            let refs: Vec<(&str, f64)> = vars.iter().map(|(k, v)| (k.as_str(), *v)).collect();
            out.push(self.eval(&refs)?);
        }
        Ok(out)
    }

    fn err(&self, e: EvalexprError) -> CliError {
        CliError::ConfigParse(format!("cannot evaluate {:?}: {e}", self.source))
    }
}

/// Appends `.0` to bare integer literals.
fn promote_integers(src: &str) -> String {
    let chars: Vec<char> = src.chars().collect();
    let mut out = String::with_capacity(src.len() + 8);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let starts_number = c.is_ascii_digit() && (i == 0 || !(chars[i - 1].is_alphanumeric() || chars[i - 1] == '_' || chars[i - 1] == '.'));
        if !starts_number {
            out.push(c);
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
            i += 1;
        }
        let mut exp = false;
        if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
            exp = true;
            i += 1;
            if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
        }
        let lit: String = chars[start..i].iter().collect();
        out.push_str(&lit);
        if !lit.contains('.') && !exp {
            out.push_str(".0");
        }
    }
    out
}
