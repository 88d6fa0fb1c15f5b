use std::io::{IsTerminal, Write};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use phasefront::landscape::{Progress, ProgressFn};

fn format_duration(d: Duration) -> String {
    let s = d.as_secs();
    if s >= 3600 {
        format!("{}h{:02}m", s / 3600, (s % 3600) / 60)
    } else if s >= 60 {
        format!("{}m{:02}s", s / 60, s % 60)
    } else {
        format!("{s}s")
    }
}

/// Progress lines on stderr: redrawn in place on a terminal, otherwise one
/// line every ten seconds.
pub fn reporter(label: &'static str) -> ProgressFn {
    let tty = std::io::stderr().is_terminal();
    let interval = if tty { Duration::from_millis(250) } else { Duration::from_secs(10) };
    let start = Instant::now();
    let last = Mutex::new(start);
    Arc::new(move |p: Progress| {
        let finished = p.done >= p.total;
        let mut last = last.lock().expect("progress lock");
        let now = Instant::now();
        if !finished && now.duration_since(*last) < interval {
            return;
        }
        *last = now;
        let frac = p.done as f64 / p.total.max(1) as f64;
        let elapsed = now.duration_since(start);
        let eta = if frac > 0.0 { elapsed.mul_f64((1.0 - frac) / frac) } else { Duration::ZERO };
        let line = format!(
            "{label}: {:5.1}%  elapsed {}  eta {}",
            100.0 * frac,
            format_duration(elapsed),
            format_duration(eta)
        );
        let mut err = std::io::stderr().lock();
        let _ = if tty { write!(err, "\r{line}{}", if finished { "\n" } else { "" }) } else { writeln!(err, "{line}") };
    })
}
