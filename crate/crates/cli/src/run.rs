use std::io::Write;
use std::path::Path;

use faceted_core::reader::TopLevel;
use faceted_core::{parse_program, Interpreter, Value};

use crate::{RunConfig, EXIT_ERROR, EXIT_USAGE};

pub fn interpreter(config: &RunConfig) -> Interpreter {
    let mut interp = Interpreter::new();
    interp.set_trace(config.trace);
    if let Some(fault) = config.fault {
        interp.inject_fault(fault);
    }
    interp
}

/// Writes pending `display` output and trace events.
pub fn flush(interp: &mut Interpreter, out: &mut impl Write) {
    for chunk in interp.take_output() {
        let _ = out.write_all(chunk.as_bytes());
    }
    for event in interp.take_trace() {
        eprintln!("trace: {event}");
    }
}

/// Runs one item, printing its value. Returns the error message on failure.
pub fn run_item(interp: &mut Interpreter, item: &TopLevel, out: &mut impl Write) -> Result<(), String> {
    let result = interp.run_item(item);
    flush(interp, out);
    match result {
        Ok(Some(Value::Void) | None) => Ok(()),
        Ok(Some(v)) => {
            let _ = writeln!(out, "{v}");
            Ok(())
        }
        Err(e) => Err(format!("{}: {e}", e.kind())),
    }
}

pub fn print_store(interp: &Interpreter) {
    eprintln!("store:");
    for (addr, v) in interp.store().iter() {
        eprintln!("  {addr} = {v}");
    }
}

pub fn run_file(path: &Path, config: &RunConfig) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: error: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let program = match parse_program(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}:{e}", path.display());
            return EXIT_USAGE;
        }
    };
    let mut interp = interpreter(config);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut code = 0;
    for (i, item) in program.items.iter().enumerate() {
        if let Err(msg) = run_item(&mut interp, item, &mut out) {
            eprintln!("{}:{}: error: {msg}", path.display(), program.position(i));
            code = EXIT_ERROR;
            break;
        }
    }
    let _ = out.flush();
    if config.print_store {
        print_store(&interp);
    }
    code
}
