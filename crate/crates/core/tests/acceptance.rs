use std::process::ExitCode;

use polydist::repro::{run_criterion, CRITERIA};
use polydist::Exec;

fn main() -> ExitCode {
    let verbose = std::env::args().any(|a| a == "--nocapture" || a == "-v");
    let mut failed = 0;
    for id in CRITERIA {
        match run_criterion(id, Exec::default()) {
            Ok(rep) => {
                println!("{}", rep.line());
                if verbose || !rep.pass {
                    for m in &rep.measurements {
                        println!("    {m}");
                    }
                }
                failed += usize::from(!rep.pass);
            }
            Err(e) => {
                println!("criterion {id}: FAIL ({e})");
                failed += 1;
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
