// SPDX-License-Identifier: Apache-2.0
//! `adaptforge` command line.

use std::path::PathBuf;
use std::process::ExitCode;

use adaptforge_core::diagnostic::{has_findings, Diagnostic};
use adaptforge_core::pipeline::{self, GenerateOptions, PipelineError, UserSelection};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adaptforge", version, about = "Generate per-user adapted variants of a Flutter app")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one adapted copy of the app per user.
    Generate(GenerateArgs),
    /// Validate models and app against each other without writing anything.
    Check(ModelArgs),
    /// Show how one rule evaluates for one user.
    Explain {
        #[arg(long)]
        context: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        user: String,
        #[arg(long)]
        rule: String,
    },
    /// Unified diff between an app and a generated variant.
    Diff {
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        variant: PathBuf,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    app: PathBuf,
    #[arg(long)]
    context: PathBuf,
    #[arg(long)]
    rules: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    models: ModelArgs,
    #[arg(long)]
    out: PathBuf,
    /// Generate for this user only.
    #[arg(long, conflicts_with = "all_users")]
    user: Option<String>,
    /// Generate for every user in the context file (the default).
    #[arg(long)]
    all_users: bool,
    /// Print the operation plan and write nothing.
    #[arg(long)]
    dry_run: bool,
    /// Process users and files on one thread.
    #[arg(long)]
    sequential: bool,
}

fn print_diagnostics<'a>(diags: impl IntoIterator<Item = &'a Diagnostic>) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn fail(e: PipelineError) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_usage() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn status(errors: bool) -> ExitCode {
    if errors {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn generate(args: GenerateArgs) -> ExitCode {
    let options = GenerateOptions {
        users: match args.user {
            Some(u) => UserSelection::One(u),
            None => UserSelection::All,
        },
        dry_run: args.dry_run,
        parallel: !args.sequential,
        ..GenerateOptions::default()
    };
    let m = &args.models;
    let report = match pipeline::generate(&m.app, &m.context, &m.rules, &args.out, &options) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    print_diagnostics(report.all_diagnostics());
    if args.dry_run {
        print!("{}", report.plans_json());
    } else {
        for v in &report.variants {
            match &v.manifest {
                Some(man) => println!(
                    "{}: {} rule(s) applied, {} file(s) adapted, {} generated -> {}",
                    v.user_id,
                    man.applied_rules.len(),
                    man.adapted_files.len(),
                    man.generated_files.len(),
                    v.dir.display()
                ),
                None => println!("{}: not generated", v.user_id),
            }
        }
    }
    status(report.has_errors())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Check(m) => match pipeline::check(&m.app, &m.context, &m.rules) {
            Ok(diags) => {
                for d in &diags {
                    println!("{d}");
                }
                if !has_findings(&diags) {
                    println!("clean");
                }
                status(diags.iter().any(Diagnostic::is_error))
            }
            Err(e) => fail(e),
        },
        Command::Explain {
            context,
            rules,
            user,
            rule,
        } => match pipeline::explain(&context, &rules, &user, &rule) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Diff { app, variant } => match pipeline::diff_dirs(&app, &variant) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}
