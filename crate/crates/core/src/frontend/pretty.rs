//! Canonical PADL text output.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "  ";

/// Renders an architecture as canonical PADL source.
pub fn pretty_print(arch: &ArchiDescription) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ARCHI_TYPE {}({})", arch.name, params(&arch.params));
    out.push('\n');
    out.push_str("ARCHI_BEHAVIOR\n");
    for aet in &arch.aets {
        out.push('\n');
        aet_text(&mut out, aet);
    }
    out.push('\n');
    out.push_str("ARCHI_TOPOLOGY\n\n");
    out.push_str(&format!("{INDENT}ARCHI_ELEM_INSTANCES\n"));
    let instances: Vec<String> = arch
        .instances
        .iter()
        .map(|i| format!("{INDENT}{INDENT}{} : {}({})", i.name, i.aet, exprs(&i.args)))
        .collect();
    out.push_str(&instances.join(";\n"));
    out.push('\n');
    out.push_str(&format!("{INDENT}ARCHI_INTERACTIONS\n"));
    if arch.archi_interactions.is_empty() {
        out.push_str(&format!("{INDENT}{INDENT}void\n"));
    } else {
        let items: Vec<String> =
            arch.archi_interactions.iter().map(|a| format!("{INDENT}{INDENT}{}", a.endpoint)).collect();
        out.push_str(&items.join(";\n"));
        out.push('\n');
    }
    out.push_str(&format!("{INDENT}ARCHI_ATTACHMENTS\n"));
    if arch.attachments.is_empty() {
        out.push_str(&format!("{INDENT}{INDENT}void\n"));
    } else {
        let items: Vec<String> = arch
            .attachments
            .iter()
            .map(|a| format!("{INDENT}{INDENT}FROM {} TO {}", a.from, a.to))
            .collect();
        out.push_str(&items.join(";\n"));
        out.push('\n');
    }
    out.push_str("\nEND\n");
    out
}

fn aet_text(out: &mut String, aet: &AetDef) {
    let _ = writeln!(out, "{INDENT}ARCHI_ELEM_TYPE {}({})", aet.name, params(&aet.params));
    let _ = writeln!(out, "{INDENT}{INDENT}BEHAVIOR");
    let eqs: Vec<String> =
        aet.equations.iter().map(|e| equation_text(e, 3)).collect();
    out.push_str(&eqs.join(";\n"));
    out.push('\n');
    for (kw, dir) in [("INPUT_INTERACTIONS", Direction::Input), ("OUTPUT_INTERACTIONS", Direction::Output)] {
        let decls: Vec<&InteractionDecl> = aet.interactions.iter().filter(|i| i.direction == dir).collect();
        let _ = write!(out, "{INDENT}{INDENT}{kw}");
        if decls.is_empty() {
            out.push_str(" void\n");
            continue;
        }
        // Consecutive declarations sharing both qualifiers form one group.
        let mut groups: Vec<Vec<&InteractionDecl>> = Vec::new();
        for d in decls {
            match groups.last_mut() {
                Some(g) if g[0].synchronicity == d.synchronicity && g[0].multiplicity == d.multiplicity => {
                    g.push(d)
                }
                _ => groups.push(vec![d]),
            }
        }
        for (gi, g) in groups.iter().enumerate() {
            if gi > 0 {
                let _ = write!(out, "\n{INDENT}{INDENT}{}", " ".repeat(kw.len()));
            }
            let names: Vec<String> = g
                .iter()
                .map(|d| match &d.dep_on {
                    Some(i) => format!("{} DEP {}", d.name, i),
                    None => d.name.clone(),
                })
                .collect();
            let _ = write!(
                out,
                " {} {} {}",
                g[0].synchronicity.keyword(),
                g[0].multiplicity.keyword(),
                names.join("; ")
            );
        }
        out.push('\n');
    }
}

/// Renders one equation; `depth` is the indentation level of its header.
pub fn equation_text(eq: &Equation, depth: usize) -> String {
    let pad = INDENT.repeat(depth);
    let mut s = format!("{pad}{}({}; void) =\n{pad}{INDENT}", eq.name, params(&eq.params));
    process_text(&mut s, &eq.body, depth + 1);
    s
}

/// Renders a process term on possibly several lines.
pub fn process_to_string(p: &Process) -> String {
    let mut s = String::new();
    process_text(&mut s, p, 0);
    s
}

fn process_text(out: &mut String, p: &Process, depth: usize) {
    match p {
        Process::Stop => out.push_str("stop"),
        Process::Invoke { equation, args, .. } => {
            let _ = write!(out, "{equation}({})", exprs(args));
        }
        Process::Prefix { action, then, .. } => {
            let _ = write!(out, "{action} . ");
            process_text(out, then, depth);
        }
        Process::Choice(branches) => {
            let pad = INDENT.repeat(depth);
            out.push_str("choice\n");
            let _ = writeln!(out, "{pad}{{");
            for (i, b) in branches.iter().enumerate() {
                let _ = write!(out, "{pad}{INDENT}");
                if let Some(g) = &b.guard {
                    let _ = write!(out, "cond({}) -> ", expr_to_string(g));
                }
                process_text(out, &b.body, depth + 1);
                if i + 1 < branches.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            let _ = write!(out, "{pad}}}");
        }
    }
}

fn params(ps: &[Param]) -> String {
    if ps.is_empty() {
        return "void".to_string();
    }
    ps.iter()
        .map(|p| match &p.default {
            Some(d) => format!("{} {} := {}", p.ty, p.name, expr_to_string(d)),
            None => format!("{} {}", p.ty, p.name),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn exprs(es: &[Expr]) -> String {
    es.iter().map(expr_to_string).collect::<Vec<_>>().join(", ")
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

/// Level of a node in the expression grammar; higher binds tighter.
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Binary(op, ..) => match op.precedence() {
            1 => 1,
            2 => 2,
            3 => 4,
            _ => 5,
        },
        Expr::Unary(UnOp::Not, _) => 3,
        Expr::Unary(UnOp::Neg, _) => 6,
        Expr::Int(v) if *v < 0 => 6,
        _ => 7,
    }
}

fn write_expr(out: &mut String, e: &Expr, min_level: u8) {
    let paren = level(e) < min_level;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Expr::Int(v) if *v < 0 => {
            let _ = write!(out, "-{}", v.unsigned_abs());
        }
        Expr::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Var(v) => out.push_str(v),
        Expr::Success(x) => {
            let _ = write!(out, "{x}.success");
        }
        Expr::Unary(UnOp::Not, inner) => {
            out.push_str("not ");
            write_expr(out, inner, 3);
        }
        Expr::Unary(UnOp::Neg, inner) => {
            out.push('-');
            write_expr(out, inner, 7);
        }
        Expr::Binary(op, l, r) => {
            let lv = level(e);
            // Comparisons do not chain, so both operands must bind tighter.
            let (left_min, right_min) = if lv == 4 { (5, 5) } else { (lv, lv + 1) };
            write_expr(out, l, left_min);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, r, right_min);
        }
    }
    if paren {
        out.push(')');
    }
}
