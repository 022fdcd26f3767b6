use std::fmt::Write as _;

use anyhow::{anyhow, Result};
use serde_json::{json, to_value, Value};

use bgg::geometry::{certify_sheaf, fiber_rank, local_pd, point, probe_degeneracy, project, SubspaceSpec};
use bgg::scalar::{rational_to_i64, Field};
use bgg::tate::{cohomology_table, dual_tate, regularity, CohomologyTable, Provenance, TateWindow};
use bgg::transforms::{beilinson_shape, betti_numbers, hilbert_from_coranks, hilbert_from_kernel, rigid_complex, walter_shape};
use bgg::zoo;
use bgg::BggError;

use crate::input::{self, Source};
use crate::{Cli, Command};

/// Rendered result of one job.
pub struct Output {
    pub text: String,
    pub json: Value,
}

fn window_text<E: Clone + Send + Sync>(t: &TateWindow<E>) -> String {
    let mut s = format!("Tate window [{}, {}] over {}, {}\n", t.lo(), t.hi(), t.field, provenance_text(&t.provenance));
    for p in t.lo()..=t.hi() {
        let terms: Vec<String> = t.twists(p).iter().map(|(a, m)| format!("ω({a})^{m}")).collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" ⊕ ") };
        let _ = writeln!(s, "{p:>4}: {body}");
    }
    s
}

fn provenance_text(p: &Provenance) -> String {
    match p {
        Provenance::FromPresentation { start, certified_with } => format!("from a presentation (start {start}, certified against {certified_with})"),
        Provenance::FromDifferential { left, right } => format!("from a differential ({left} steps left, {right} right)"),
        Provenance::Dual { .. } => "dual window".into(),
        Provenance::Projection { codim, .. } => format!("projection from a center of codimension {codim}"),
    }
}

fn table_text(tab: &CohomologyTable) -> String {
    format!("{tab}")
}

fn subspace<F: Field>(f: &F, v: usize, point_arg: &Option<String>, forms: &Option<String>) -> Result<SubspaceSpec<F::Elem>> {
    match (point_arg, forms) {
        (Some(p), None) => {
            let coords = input::parse_vector(f, p)?;
            if coords.len() != v + 1 {
                return Err(BggError::InvalidInput(format!("a point of P^{v} needs {} coordinates", v + 1)).into());
            }
            Ok(point(f, coords)?)
        }
        (None, Some(s)) => Ok(SubspaceSpec::new(f, v, input::parse_forms(f, s)?)?),
        (None, None) => Ok(SubspaceSpec::new(f, v, Vec::new())?),
        (Some(_), Some(_)) => Err(BggError::InvalidInput("give either --point or --forms".into()).into()),
    }
}

fn load<F: Field>(f: &F, cli: &Cli, forced: Option<&str>) -> Result<(Source<F::Elem>, (i64, i64))> {
    match (forced.or(cli.builtin.as_deref()), &cli.input) {
        (Some(name), None) => Ok((input::builtin(f, name)?, input::default_window(Some(name)))),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| anyhow!("cannot read {}: {e}", path.display()))?;
            Ok((input::parse_document(f, &text)?, input::default_window(None)))
        }
        (None, None) => Err(BggError::InvalidInput("give --input FILE or --builtin NAME".into()).into()),
        (Some(_), Some(_)) => Err(BggError::InvalidInput("give only one of --input and --builtin".into()).into()),
    }
}

fn window<F: Field>(f: &F, cli: &Cli, forced: Option<&str>) -> Result<TateWindow<F::Elem>> {
    let (src, default) = load(f, cli, forced)?;
    let requested = cli.window.as_deref().map(input::parse_window).transpose()?;
    Ok(input::resolve(f, &src, requested, default, cli.start)?)
}

pub fn run<F: Field>(f: &F, cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::DemoSchur { v, p } => return demo_schur(f, cli, *v, *p),
        Command::DemoHm
            if (cli.input.is_some() || cli.builtin.as_deref().is_some_and(|b| b != "hm")) => {
                return Err(BggError::InvalidInput("demo-hm takes no input".into()).into());
            }
        _ => {}
    }
    let forced = matches!(cli.command, Command::DemoHm).then_some("hm");
    let t = window(f, cli, forced)?;
    let out = match &cli.command {
        Command::Tate => Output { text: window_text(&t), json: t.to_json(f) },
        Command::Table => {
            let tab = cohomology_table(&t);
            Output { text: table_text(&tab), json: to_value(&tab)? }
        }
        Command::Regularity => {
            let reg = regularity(&cohomology_table(&t))?;
            let text = if reg.sharp {
                format!("regularity {}\n", reg.value)
            } else {
                format!("regularity ≤ {} (the window floor; widen the window for the exact value)\n", reg.value)
            };
            Output { text, json: to_value(reg)? }
        }
        Command::Hilbert { position } => {
            let p = position.unwrap_or(t.lo() + 1);
            let h = hilbert_from_kernel(f, &t, p)?;
            let mut checks = Vec::new();
            for n in t.lo() - t.v() as i64..=t.hi() {
                if let Ok(c) = hilbert_from_coranks(&t, n) {
                    if rational_to_i64(&h.eval(n)) == Some(c) {
                        checks.push(n);
                    } else {
                        return Err(BggError::NotExact(format!("coranks give χ({n}) = {c}, the kernel at {p} gives {}", h.eval(n))).into());
                    }
                }
            }
            let text = format!("{h}\n");
            Output { text, json: json!({"position": p, "polynomial": h, "corank_checks": checks}) }
        }
        Command::Betti { floor } => {
            let s = betti_numbers(f, &t, *floor)?;
            Output { text: s.betti_layout(), json: to_value(&s)? }
        }
        Command::Beilinson { r } => {
            let s = beilinson_shape(f, &t, *r)?;
            Output { text: s.to_string(), json: to_value(&s)? }
        }
        Command::Walter { r, lpd, floor } => {
            let s = walter_shape(f, &t, *r, *lpd, *floor)?;
            Output { text: s.to_string(), json: to_value(&s)? }
        }
        Command::Rigid { n } => {
            let r = rigid_complex(f, &t, *n)?;
            let mut text = format!("rigid complex of ker d^{n}\n");
            for (k, (q, m)) in r.twists.iter().zip(&r.ranks).enumerate() {
                if *m > 0 {
                    let _ = writeln!(text, "{:>4}: S({q})^{m}", r.lo + k as i64);
                }
            }
            Output { text, json: r.to_json(f) }
        }
        Command::Fiber { point: pt, position } => {
            let sub = subspace(f, t.v(), &Some(pt.clone()), &None)?;
            let r = fiber_rank(f, &t, &sub, *position)?;
            Output { text: format!("fiber rank at ({pt}): {r}\n"), json: json!({"point": pt, "position": position, "rank": r}) }
        }
        Command::Localpd { point: pt, position } => {
            let sub = subspace(f, t.v(), &Some(pt.clone()), &None)?;
            let pd = local_pd(f, &t, &sub, *position)?;
            let text = match pd {
                Some(d) => format!("local projective dimension at ({pt}): {d}\n"),
                None => format!("({pt}) is not in the support\n"),
            };
            Output { text, json: json!({"point": pt, "position": position, "pd": pd}) }
        }
        Command::Probe { point: pt, forms, position, samples, seed } => {
            let sub = subspace(f, t.v(), pt, forms)?;
            let rep = probe_degeneracy(f, &t, &sub, *position, *samples, *seed)?;
            Output { text: rep.to_string(), json: to_value(&rep)? }
        }
        Command::Certify { a, l, samples, seed } => {
            let e3 = t.complex.truncate(a - 1, a + 1);
            let verdict = certify_sheaf(f, &e3, *a, l.unwrap_or(t.v()), *samples, *seed)?;
            Output { text: verdict.to_string(), json: to_value(&verdict)? }
        }
        Command::Project { point: pt, forms } => {
            let sub = subspace(f, t.v(), pt, forms)?;
            let pr = project(f, &t, &sub)?;
            let tab = cohomology_table(&pr);
            Output { text: format!("{}{}", window_text(&pr), table_text(&tab)), json: json!({"window": pr.to_json(f), "table": tab}) }
        }
        Command::Dual => {
            let d = dual_tate(f, &t);
            let tab = cohomology_table(&d);
            Output { text: format!("{}{}", window_text(&d), table_text(&tab)), json: json!({"window": d.to_json(f), "table": tab}) }
        }
        Command::DemoHm => {
            let tab = cohomology_table(&t);
            let h = hilbert_from_kernel(f, &t, t.lo() + 1)?;
            let text = format!("Horrocks-Mumford bundle on P^4\n{}{h}\n", table_text(&tab));
            Output { text, json: json!({"table": tab, "polynomial": h}) }
        }
        Command::DemoSchur { .. } => unreachable!("handled above"),
    };
    Ok(out)
}

fn demo_schur<F: Field>(f: &F, cli: &Cli, v: usize, p: usize) -> Result<Output> {
    let pres = zoo::twisted_differentials(f, v, p)?;
    let (lo, hi) = cli.window.as_deref().map(input::parse_window).transpose()?.unwrap_or((-(v as i64) - 3, 3));
    let t = bgg::tate::tate_from_presentation(f, &pres, cli.start, lo, hi)?;
    let tab = cohomology_table(&t);
    let lam = zoo::Partition::column(v, p);
    let mut mismatches = Vec::new();
    let mut cells = 0;
    for c in tab.cells.iter() {
        if let Some(got) = c.value {
            let want = zoo::schur_cell(v, &lam, c.i, c.n)?;
            cells += 1;
            if want != got.into() {
                mismatches.push(json!({"i": c.i, "n": c.n, "computed": got, "predicted": want.to_string()}));
            }
        }
    }
    let mut text = format!("Ω^{p}({p}) on P^{v}\n{}", table_text(&tab));
    if mismatches.is_empty() {
        let _ = writeln!(text, "all {cells} certified cells agree with the Schur-module prediction");
    } else {
        let _ = writeln!(text, "{} of {cells} certified cells disagree with the Schur-module prediction", mismatches.len());
    }
    let json = json!({"table": tab, "cells": cells, "mismatches": mismatches});
    if !mismatches.is_empty() {
        return Err(BggError::NotExact(text).into());
    }
    Ok(Output { text, json })
}
