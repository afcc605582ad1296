use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;

use super::{Session, SessionConfig};

/// Runs one session over a stream: each request line gets its responses
/// back as JSON lines, in order.
pub fn serve_connection(stream: TcpStream, mut session: Session) -> io::Result<Session> {
    let reader = BufReader::new(stream.try_clone()?);
    let mut writer = io::BufWriter::new(stream);
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for r in session.handle_line(&line) {
            writer.write_all(r.to_json().as_bytes())?;
            writer.write_all(b"\n")?;
        }
        writer.flush()?;
    }
    Ok(session)
}

/// Accepts connections forever (or `limit` of them), each with a fresh
/// session in its own thread.
pub fn serve(listener: TcpListener, config: SessionConfig, limit: Option<usize>) -> io::Result<()> {
    let mut workers = Vec::new();
    for (n, stream) in listener.incoming().enumerate() {
        let stream = stream?;
        let session = Session::new(format!("conn-{n}"), config.clone());
        workers.push(thread::spawn(move || serve_connection(stream, session)));
        if limit.is_some_and(|l| n + 1 >= l) {
            break;
        }
    }
    for w in workers {
        if let Err(e) = w.join().expect("session thread panicked") {
            eprintln!("connection ended with error: {e}");
        }
    }
    Ok(())
}
