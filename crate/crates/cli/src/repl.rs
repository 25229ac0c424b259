use std::io::{BufRead, Write};

use faceted_core::reader::Reader;

use crate::run::{interpreter, print_store, run_item};
use crate::RunConfig;

/// Reader errors that more input could fix.
fn incomplete(message: &str) -> bool {
    message.starts_with("unexpected end of input")
        || message.contains("missing")
        || message.starts_with("unterminated string")
}

pub fn repl(config: &RunConfig) -> u8 {
    let mut interp = interpreter(config);
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut pending = String::new();
    let mut lines = stdin.lock().lines();
    loop {
        let _ = write!(out, "{}", if pending.is_empty() { "> " } else { ". " });
        let _ = out.flush();
        let Some(Ok(line)) = lines.next() else {
            let _ = writeln!(out);
            break;
        };
        if pending.is_empty() {
            match line.trim() {
                "" => continue,
                ":quit" | ":q" => break,
                ":trace on" => {
                    interp.set_trace(true);
                    continue;
                }
                ":trace off" => {
                    interp.set_trace(false);
                    continue;
                }
                cmd if cmd.starts_with(':') => {
                    eprintln!("unknown command {cmd}; try :trace on, :trace off or :quit");
                    continue;
                }
                _ => {}
            }
        }
        pending.push_str(&line);
        pending.push('\n');
        let program = match Reader::with_defined(interp.global_names().map(str::to_string).collect::<Vec<_>>())
            .parse_program(&pending)
        {
            Ok(p) => p,
            Err(e) if incomplete(&e.message) => continue,
            Err(e) => {
                eprintln!("{e}");
                pending.clear();
                continue;
            }
        };
        pending.clear();
        for item in &program.items {
            if let Err(msg) = run_item(&mut interp, item, &mut out) {
                eprintln!("error: {msg}");
                break;
            }
        }
        if config.print_store {
            print_store(&interp);
        }
    }
    let _ = out.flush();
    0
}
