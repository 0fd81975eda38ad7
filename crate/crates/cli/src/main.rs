use std::io::Write;

// terms nest deeply (numerals are chains of S), and every pass over them recurses
const STACK: usize = 512 << 20;

fn main() {
    let code = std::thread::Builder::new()
        .stack_size(STACK)
        .spawn(|| {
            let stdout = std::io::stdout();
            let stderr = std::io::stderr();
            let mut out = stdout.lock();
            let mut err = stderr.lock();
            let code = lrec::main_with(std::env::args_os(), &mut out, &mut err);
            let _ = out.flush();
            code
        })
        .expect("spawn main thread")
        .join()
        .unwrap_or(101);
    std::process::exit(code);
}
