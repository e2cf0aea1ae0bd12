use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use procnet_core::compat::{linearizations, process_of};
use procnet_core::conflict::{
    binary_conflict_free, conflict_free, is_structural_conflict_net, ConflictReport, Verdict,
};
use procnet_core::diamond::largest_fs_process;
use procnet_core::dot::{net_to_dot, process_to_dot};
use procnet_core::format::{
    marking_doc, parse_net, process_from_json, process_to_json, word_doc, AdjacencyDoc, ConflictReportDoc, LargestDoc,
    SwapCertificateDoc,
};
use procnet_core::seqequiv::{fs_le_witness, seq_star_equiv};
use procnet_core::swapping::{bd_le, swap_star_equiv};
use procnet_core::{Budget, Error, Net, Process, Word};

mod suite;

#[derive(Parser)]
#[command(name = "procnet", version, about = "Process semantics for place/transition nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Net description file.
    #[arg(long, global = true)]
    net: Option<PathBuf>,

    /// Longest firing sequence to enumerate.
    #[arg(long, global = true, default_value_t = 4)]
    max_len: usize,

    /// Most reachable markings to explore.
    #[arg(long, global = true, default_value_t = 100_000)]
    marking_budget: usize,

    /// Largest transition multiplicity tried in a step.
    #[arg(long, global = true, default_value_t = 4)]
    mult_cap: u64,

    /// Print the certificate backing a positive answer.
    #[arg(long, global = true)]
    certificate: bool,

    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a net.
    Validate,
    /// Replay a word and print the marking reached.
    Fire { word: String },
    /// List firing sequences up to --max-len.
    EnumFs,
    /// List the linearizations of a process.
    Lin { process: PathBuf },
    /// Build the process of a firing sequence.
    ProcessOf { word: String },
    /// Are two firing sequences related by adjacent transpositions?
    EquivSeq { sigma: String, rho: String },
    /// Are two processes related by swaps?
    EquivProc { p: PathBuf, q: PathBuf },
    /// Is the first sequence below the second in the prefix-modulo-transposition order?
    LeSeq { sigma: String, rho: String },
    /// Is the first process below the second?
    LeProc { p: PathBuf, q: PathBuf },
    /// Search reachable markings for conflicts.
    Conflicts {
        /// Check steps of every size, not just pairs.
        #[arg(long)]
        full: bool,
    },
    /// Check that concurrently enabled transitions never share a preplace.
    Structural,
    /// Build a run above every firing sequence up to --max-len.
    Largest {
        /// Also write the process of the run as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run the property suite on a net or on generated nets.
    Verify {
        /// Check this many generated nets instead of --net. The first seed
        /// is read from PROCNET_SEED.
        #[arg(long)]
        random: Option<u64>,
    },
    /// Print a net, or a process with --process, as Graphviz DOT.
    ExportDot {
        #[arg(long)]
        process: Option<PathBuf>,
    },
}

/// What a command concluded. Mapped one to one onto exit codes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Outcome {
    Holds,
    Fails,
    Bounded,
}

impl Outcome {
    fn from_verdict(v: Verdict) -> Self {
        match v {
            Verdict::Holds => Outcome::Holds,
            Verdict::BoundedHolds => Outcome::Bounded,
            Verdict::Fails => Outcome::Fails,
        }
    }

    fn from_bool(b: bool) -> Self {
        if b {
            Outcome::Holds
        } else {
            Outcome::Fails
        }
    }

    fn code(self) -> u8 {
        match self {
            Outcome::Holds => 0,
            Outcome::Fails => 1,
            Outcome::Bounded => 3,
        }
    }
}

/// Bad input: unreadable files, parse errors, failed validation.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Run<String> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

impl Cli {
    fn budget(&self) -> Budget {
        Budget {
            max_markings: self.marking_budget,
            ..Budget::ample()
        }
    }

    fn load_net(&self) -> Run<Net> {
        let path = self.net.as_ref().ok_or_else(|| Failure("--net is required".into()))?;
        parse_net(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
    }

    fn load_process(&self, net: &Net, path: &Path) -> Run<Process> {
        process_from_json(net, &read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
    }

    /// A word that must be a firing sequence.
    fn firing_sequence(&self, net: &Net, text: &str) -> Run<Word> {
        let w = net.parse_word(text)?;
        net.marking_after(&w)?;
        Ok(w)
    }

    fn run(&self) -> Run<Outcome> {
        if let Command::Verify { random: Some(n) } = self.command {
            let base = match std::env::var("PROCNET_SEED") {
                Ok(s) => s
                    .parse()
                    .map_err(|_| Failure(format!("PROCNET_SEED: not a number: {s}")))?,
                Err(_) => 0,
            };
            return Ok(suite::run_random(
                base,
                n,
                self.max_len,
                self.budget(),
                self.mult_cap,
                self.json,
            ));
        }
        let net = self.load_net()?;
        match &self.command {
            Command::Validate => {
                if self.json {
                    print_json(&json!({
                        "name": net.name(),
                        "places": net.place_count(),
                        "transitions": net.transition_count(),
                        "initial": marking_doc(&net, net.initial_marking()),
                    }));
                } else {
                    println!(
                        "{}: {} places, {} transitions, initial marking {}",
                        net.name(),
                        net.place_count(),
                        net.transition_count(),
                        net.render_marking(net.initial_marking())
                    );
                }
                Ok(Outcome::Holds)
            }
            Command::Fire { word } => {
                let w = net.parse_word(word)?;
                let reached = net.fire_word(net.initial_marking(), &w);
                if self.json {
                    print_json(&match &reached {
                        Ok(m) => json!({ "firable": true, "marking": marking_doc(&net, m) }),
                        Err(e) => json!({ "firable": false, "blocked_at": e.index }),
                    });
                } else {
                    match &reached {
                        Ok(m) => println!("{}", net.render_marking(m)),
                        Err(e) => println!(
                            "not firable: {} at index {} is not enabled at {}",
                            net.transition_name(w[e.index]),
                            e.index,
                            net.render_marking(&net.marking_after(&w[..e.index]).expect("prefix fires"))
                        ),
                    }
                }
                Ok(Outcome::from_bool(reached.is_ok()))
            }
            Command::EnumFs => {
                let words = net.enumerate_firing_sequences(self.max_len);
                let truncated = net.has_firing_sequence_longer_than(self.max_len);
                if self.json {
                    let ws: Vec<_> = words.iter().map(|w| word_doc(&net, w)).collect();
                    print_json(&json!({ "words": ws, "truncated": truncated }));
                } else {
                    for w in &words {
                        println!("{}", net.render_word(w));
                    }
                    if truncated {
                        println!("# longer firing sequences exist");
                    }
                }
                Ok(Outcome::Holds)
            }
            Command::Lin { process } => {
                let p = self.load_process(&net, process)?;
                let lins = linearizations(&net, &p);
                if self.json {
                    let ws: Vec<_> = lins.iter().map(|w| word_doc(&net, w)).collect();
                    print_json(&json!(ws));
                } else {
                    for w in &lins {
                        println!("{}", net.render_word(w));
                    }
                }
                Ok(Outcome::Holds)
            }
            Command::ProcessOf { word } => {
                let w = self.firing_sequence(&net, word)?;
                println!("{}", process_to_json(&net, &process_of(&net, &w)?));
                Ok(Outcome::Holds)
            }
            Command::EquivSeq { sigma, rho } => {
                let s = self.firing_sequence(&net, sigma)?;
                let r = self.firing_sequence(&net, rho)?;
                let cert = seq_star_equiv(&net, &s, &r)?;
                let doc = cert.as_ref().map(|c| AdjacencyDoc::new(&net, c));
                self.answer("equivalent", cert.is_some(), doc.map(|d| json!(d)), |d| {
                    format!("chain of {} transpositions", d["steps"].as_array().map_or(0, Vec::len))
                });
                Ok(Outcome::from_bool(cert.is_some()))
            }
            Command::EquivProc { p, q } => {
                let p = self.load_process(&net, p)?;
                let q = self.load_process(&net, q)?;
                let cert = swap_star_equiv(&p, &q);
                let doc = cert.as_ref().map(|c| SwapCertificateDoc::new(&net, c));
                self.answer("equivalent", cert.is_some(), doc.map(|d| json!(d)), |d| {
                    format!("chain of {} swaps", d["moves"].as_array().map_or(0, Vec::len))
                });
                Ok(Outcome::from_bool(cert.is_some()))
            }
            Command::LeSeq { sigma, rho } => {
                let s = self.firing_sequence(&net, sigma)?;
                let r = self.firing_sequence(&net, rho)?;
                let w = fs_le_witness(&net, &s, &r)?;
                let doc = w.as_ref().map(|w| {
                    json!({
                        "sigma_prime": word_doc(&net, &w.sigma_prime),
                        "rho_prefix_len": w.rho_prefix_len,
                        "certificate": AdjacencyDoc::new(&net, &w.certificate),
                    })
                });
                self.answer("below", w.is_some(), doc, |d| {
                    format!("via a prefix of length {} of the second word", d["rho_prefix_len"])
                });
                Ok(Outcome::from_bool(w.is_some()))
            }
            Command::LeProc { p, q } => {
                let p = self.load_process(&net, p)?;
                let q = self.load_process(&net, q)?;
                let le = bd_le(&net, &p, &q)?;
                self.answer("below", le, None, |_| String::new());
                Ok(Outcome::from_bool(le))
            }
            Command::Conflicts { full } => {
                let r = if *full {
                    conflict_free(&net, self.budget(), self.mult_cap)
                } else {
                    binary_conflict_free(&net, self.budget())
                };
                self.report(&net, &r);
                Ok(Outcome::from_verdict(r.verdict))
            }
            Command::Structural => {
                let r = is_structural_conflict_net(&net, self.budget());
                self.report(&net, &r);
                Ok(Outcome::from_verdict(r.verdict))
            }
            Command::Largest { dot } => {
                let w = match largest_fs_process(&net, self.max_len, self.budget()) {
                    Err(Error::NotBinaryConflictFree(w)) => {
                        let r = ConflictReport {
                            verdict: Verdict::Fails,
                            witnesses: vec![*w],
                            capped: false,
                        };
                        self.report(&net, &r);
                        return Ok(Outcome::Fails);
                    }
                    w => w?,
                };
                if let Some(path) = dot {
                    let p = process_of(&net, &w.rho)?;
                    fs::write(path, process_to_dot(&net, &p))
                        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                }
                if self.json || self.certificate {
                    print_json(&json!(LargestDoc::new(&net, &w)));
                } else {
                    println!(
                        "run {} covers {} firing sequences",
                        net.render_word(&w.rho),
                        w.entries.len()
                    );
                    if w.truncated {
                        println!("# longer firing sequences exist");
                    }
                }
                Ok(Outcome::from_verdict(w.conflict_check))
            }
            Command::Verify { .. } => Ok(suite::run_one(
                &net,
                self.max_len,
                self.budget(),
                self.mult_cap,
                self.json,
            )),
            Command::ExportDot { process } => {
                match process {
                    Some(path) => print!("{}", process_to_dot(&net, &self.load_process(&net, path)?)),
                    None => print!("{}", net_to_dot(&net)),
                }
                Ok(Outcome::Holds)
            }
        }
    }

    fn answer(&self, key: &str, yes: bool, certificate: Option<Value>, summary: impl Fn(&Value) -> String) {
        if self.json {
            let mut v = json!({ key: yes });
            if let (true, Some(c)) = (self.certificate, &certificate) {
                v["certificate"] = c.clone();
            }
            print_json(&v);
            return;
        }
        match (&certificate, yes) {
            (Some(c), true) => println!("{key}: yes ({})", summary(c)),
            (_, true) => println!("{key}: yes"),
            (_, false) => println!("{key}: no"),
        }
        if let (true, Some(c)) = (self.certificate, &certificate) {
            print_json(c);
        }
    }

    fn report(&self, net: &Net, r: &ConflictReport) {
        if self.json {
            print_json(&json!(ConflictReportDoc::new(net, r)));
            return;
        }
        let verdict = match r.verdict {
            Verdict::Holds => "holds",
            Verdict::BoundedHolds => "holds within budget",
            Verdict::Fails => "fails",
        };
        println!("{verdict}");
        for w in &r.witnesses {
            println!(
                "  step {} at {} after {}",
                net.render_step(&w.step),
                net.render_marking(&w.marking),
                net.render_word(&w.word)
            );
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.run() {
        Ok(o) => ExitCode::from(o.code()),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_verdicts() {
        assert_eq!(Outcome::from_verdict(Verdict::Holds).code(), 0);
        assert_eq!(Outcome::from_verdict(Verdict::Fails).code(), 1);
        assert_eq!(Outcome::from_verdict(Verdict::BoundedHolds).code(), 3);
    }

    #[test]
    fn arguments_parse() {
        let cli = Cli::try_parse_from(["procnet", "conflicts", "--net", "x.net", "--full", "--mult-cap", "2"]).unwrap();
        assert_eq!(cli.mult_cap, 2);
        assert!(matches!(cli.command, Command::Conflicts { full: true }));
    }
}
