//! Batch pipelines behind the command-line tool.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rayon::prelude::*;

use crate::calf::check::cbpv_check;
use crate::calf::eval::{cbpv_eval, DEFAULT_CBPV_FUEL};
use crate::calf::kripke::extract_cost_with_fuel;
use crate::calf::syntax::{CType, CbpvTerm, CbpvType, Comp};
use crate::check::Checker;
use crate::model::Model;
use crate::nbe::{Nbe, Reduction, DEFAULT_FUEL};
use crate::phase::check_laws;
use crate::report::{Diagnostic, Item, Language, Report, Status};
use crate::surface::sexp::{parse_document, Sexp};
use crate::surface::{calf, stc, LowerError, LowerErrorKind};
use crate::syntax::{Context, Term};

/// Stack size of worker threads; deep terms recurse deeply.
pub const WORKER_STACK: usize = 64 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Canon,
    Laws,
    Calf,
    Corpus,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Canon => "canon",
            Command::Laws => "laws",
            Command::Calf => "calf",
            Command::Corpus => "corpus",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub trace: bool,
    pub size: usize,
    /// Step budget for both the dependent and the CBPV evaluators.
    pub fuel: u64,
    /// Worker threads for `corpus` and `laws`; 0 picks the core count.
    pub jobs: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            trace: false,
            size: crate::phase::DEFAULT_LAW_SIZE,
            fuel: DEFAULT_FUEL.max(DEFAULT_CBPV_FUEL),
            jobs: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Input {
    pub name: String,
    pub text: String,
}

impl Input {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        Input {
            name: name.into(),
            text: text.into(),
        }
    }

    pub fn language(&self) -> Language {
        if self.name.ends_with(".calf") {
            Language::Calf
        } else {
            Language::Stc
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pipeline {
    Check,
    Canon,
    Cost,
}

pub fn run(command: Command, opts: &Options, inputs: &[Input]) -> Report {
    let start = Instant::now();
    let mut report = Report::new(command.name(), inputs.iter().map(|i| i.name.clone()).collect());
    match command {
        Command::Laws => match pool(opts).map(|p| p.install(|| check_laws(opts.size))) {
            Ok(Ok(laws)) => report.laws = Some(laws),
            Ok(Err(e)) => report.error = Some(Diagnostic::new("size", e.to_string())),
            Err(e) => report.error = Some(e),
        },
        Command::Check => report.items = run_files(inputs, opts, |i| (i.language(), Pipeline::Check)),
        Command::Canon => report.items = run_files(inputs, opts, |_| (Language::Stc, Pipeline::Canon)),
        Command::Calf => report.items = run_files(inputs, opts, |_| (Language::Calf, Pipeline::Cost)),
        Command::Corpus => match pool(opts) {
            Ok(p) => {
                report.items = p.install(|| {
                    inputs
                        .par_iter()
                        .map(|i| corpus_file(i, opts))
                        .collect::<Vec<_>>()
                        .concat()
                })
            }
            Err(e) => report.error = Some(e),
        },
    }
    report.timings.total_ms = start.elapsed().as_millis() as u64;
    report.finish();
    report
}

/// One shared pool per thread count.
fn pool(opts: &Options) -> Result<Arc<rayon::ThreadPool>, Diagnostic> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    if let Some(p) = pools.get(&opts.jobs) {
        return Ok(p.clone());
    }
    let p = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .stack_size(WORKER_STACK)
        .build()
        .map(Arc::new)
        .map_err(|e| Diagnostic::new("thread_pool", e.to_string()))?;
    pools.insert(opts.jobs, p.clone());
    Ok(p)
}

fn run_files(inputs: &[Input], opts: &Options, pick: impl Fn(&Input) -> (Language, Pipeline)) -> Vec<Item> {
    inputs
        .iter()
        .flat_map(|i| {
            let (lang, pipeline) = pick(i);
            run_file(i, lang, pipeline, opts)
        })
        .collect()
}

fn corpus_file(input: &Input, opts: &Options) -> Vec<Item> {
    match input.language() {
        Language::Stc => run_file(input, Language::Stc, Pipeline::Canon, opts),
        Language::Calf => run_file(input, Language::Calf, Pipeline::Cost, opts),
    }
}

/// Runs one pipeline on every top-level form of a file.
fn run_file(input: &Input, lang: Language, pipeline: Pipeline, opts: &Options) -> Vec<Item> {
    let doc = match parse_document(&input.text) {
        Ok(doc) => doc,
        Err(e) => {
            return vec![Item {
                file: input.name.clone(),
                line: e.line as usize,
                col: e.col as usize,
                language: Some(lang),
                status: Status::Error,
                error: Some(Diagnostic::new("parse", e.message.clone()).at(e.line as usize, e.col as usize)),
                ..Item::default()
            }]
        }
    };
    doc.forms()
        .enumerate()
        .map(|(index, form)| {
            let mut item = Item {
                file: input.name.clone(),
                index,
                line: form.span.start.line as usize,
                col: form.span.start.col as usize,
                language: Some(lang),
                source: form.to_string(),
                status: Status::Pass,
                ..Item::default()
            };
            let outcome = match lang {
                Language::Stc => stc_form(form, pipeline, opts, &mut item),
                Language::Calf => calf_form(form, pipeline, opts, &mut item),
            };
            if let Err((status, diag)) = outcome {
                item.status = status;
                item.error = Some(diag);
            }
            item
        })
        .collect()
}

type Outcome = Result<(), (Status, Diagnostic)>;

fn fail(code: impl Into<String>, message: impl Into<String>) -> (Status, Diagnostic) {
    (Status::Fail, Diagnostic::new(code, message))
}

fn lower_failure(e: LowerError) -> (Status, Diagnostic) {
    let (status, code) = match e.kind {
        LowerErrorKind::Syntax => (Status::Error, "syntax"),
        LowerErrorKind::Unbound => (Status::Fail, "unbound"),
        LowerErrorKind::Sort => (Status::Fail, "sort"),
    };
    let pos = e.pos();
    (
        status,
        Diagnostic::new(code, e.message).at(pos.line as usize, pos.col as usize),
    )
}

fn reduction_name(r: Reduction) -> &'static str {
    match r {
        Reduction::IfBeta1 => "if_beta1",
        Reduction::IfBeta2 => "if_beta2",
        Reduction::PiBeta => "pi_beta",
    }
}

fn stc_form(form: &Sexp, pipeline: Pipeline, opts: &Options, item: &mut Item) -> Outcome {
    let entry = stc::lower_entry(form).map_err(lower_failure)?;
    item.ty = Some(stc::print_term(&entry.ty, &[]));
    let checker = Checker::new(Nbe::new(opts.fuel));
    let empty = Context::empty();
    let typed = checker
        .check(&empty, &entry.term, &entry.ty)
        .map_err(|e| fail(e.code(), e.to_string()))?;
    if pipeline == Pipeline::Check {
        if opts.trace {
            let nbe = Nbe::new(opts.fuel).with_trace();
            nbe.normalize(&[], &entry.term, &entry.ty)
                .map_err(|e| fail("eval", e.to_string()))?;
            item.trace = Some(
                nbe.take_trace()
                    .into_iter()
                    .map(|r| reduction_name(r).to_string())
                    .collect(),
            );
        }
        return Ok(());
    }

    let model = Model::new(opts.fuel);
    let tracking = model.verify_tracking(&typed);
    item.tracking_ok = Some(tracking.ok);
    let ty_nf = checker
        .normalize_type(&empty, &entry.ty)
        .map_err(|e| fail(e.code(), e.to_string()))?;
    if ty_nf == Term::Bool {
        let canon = model
            .canonical(&entry.term)
            .map_err(|e| fail(e.code(), e.to_string()))?;
        item.tag = Some(canon.tag);
        item.witness_steps = Some(canon.witness.len());
        let replay = canon.replay(opts.fuel);
        item.witness_ok = Some(replay.is_ok());
        if opts.trace {
            item.trace = Some(
                canon
                    .witness
                    .trace()
                    .into_iter()
                    .map(|s| format!("{}{}: {} ~> {}", "  ".repeat(s.depth), s.rule, s.lhs, s.rhs))
                    .collect(),
            );
        }
        let nf = Nbe::new(opts.fuel)
            .normalize(&[], &entry.term, &Term::Bool)
            .map_err(|e| fail("eval", e.to_string()))?;
        item.nbe_tag = match nf {
            Term::True => Some(true),
            Term::False => Some(false),
            _ => None,
        };
        if let Err(e) = replay {
            return Err(fail("witness", e.to_string()));
        }
        if item.nbe_tag != Some(canon.tag) {
            return Err(fail(
                "canonicity",
                format!(
                    "model tag {} disagrees with the normal form {}",
                    canon.tag,
                    stc::print_term(&nf, &[])
                ),
            ));
        }
    }
    if !tracking.ok {
        return Err(fail("tracking", tracking.error.unwrap_or_default()));
    }
    Ok(())
}

fn calf_form(form: &Sexp, pipeline: Pipeline, opts: &Options, item: &mut Item) -> Outcome {
    let entry = calf::lower_entry(form).map_err(lower_failure)?;
    item.ty = Some(match &entry.ty {
        CbpvType::Val(a) => calf::print_vtype(a),
        CbpvType::Comp(x) => calf::print_ctype(x),
    });
    cbpv_check(&Vec::new(), &entry.term, &entry.ty).map_err(|e| fail(e.code(), e.to_string()))?;
    if pipeline == Pipeline::Check {
        return Ok(());
    }
    let m: &Comp = match (&entry.term, &entry.ty) {
        (CbpvTerm::Comp(m), CbpvType::Comp(x)) if *x == CType::f_bool() => m,
        _ => {
            return Err(fail(
                "expected_f_bool",
                format!(
                    "cost extraction needs a closed computation of type (F bool), found {}",
                    item.ty.as_deref().unwrap_or("?")
                ),
            ))
        }
    };
    let res = extract_cost_with_fuel(m, opts.fuel).map_err(|e| fail("kripke", e.to_string()))?;
    item.cost = Some(res.cost);
    item.tag = Some(res.tag);
    let evaluated = cbpv_eval(m, opts.fuel).map_err(|e| fail("eval", e.to_string()))?;
    item.eval_cost = Some(evaluated.cost);
    item.eval_tag = match &evaluated.terminal {
        Comp::Ret(v) => v.as_bool(),
        _ => None,
    };
    let replay = |w: &crate::calf::kripke::CalfWitness| w.replay(opts.fuel).unwrap_or(false);
    let top_ok = replay(res.top_witness());
    let beh_ok = replay(res.beh_witness());
    item.top_witness_ok = Some(top_ok && res.top_ok);
    item.beh_witness_ok = Some(beh_ok && res.beh_ok);
    item.witness_ok = Some(top_ok && beh_ok && res.monotone_ok);
    if item.eval_cost != item.cost || item.eval_tag != item.tag {
        return Err(fail(
            "cost",
            format!(
                "model gives cost {} and value {}, evaluation gives cost {} and {:?}",
                res.cost, res.tag, evaluated.cost, item.eval_tag
            ),
        ));
    }
    if !(top_ok && beh_ok && res.top_ok && res.beh_ok && res.monotone_ok) {
        return Err(fail("witness", "a cost witness failed to replay"));
    }
    Ok(())
}
