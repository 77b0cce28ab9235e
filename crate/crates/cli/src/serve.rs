use std::io::Write;
use std::sync::Arc;

use traceqa_service::Store;

use crate::args::ServeArgs;
use crate::error::{CliError, CliResult};

async fn shutdown_signal() {
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        match signal(SignalKind::terminate()) {
            Ok(mut term) => {
                tokio::select! {
                    _ = tokio::signal::ctrl_c() => {}
                    _ = term.recv() => {}
                }
            }
            Err(_) => {
                let _ = tokio::signal::ctrl_c().await;
            }
        }
    }
    #[cfg(not(unix))]
    {
        let _ = tokio::signal::ctrl_c().await;
    }
}

/// Serves until SIGINT or SIGTERM. Every accepted record is already on disk,
/// so stopping never loses data.
pub fn run(args: &ServeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let store = Arc::new(Store::open(&args.store)?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::io("tokio runtime", e))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.bind)
            .await
            .map_err(|e| CliError::io(format!("bind {}", args.bind), e))?;
        let addr = listener
            .local_addr()
            .map_err(|e| CliError::io("local address", e))?;
        let _ = writeln!(stdout, "listening on http://{addr}");
        let _ = stdout.flush();
        traceqa_service::serve(listener, store, shutdown_signal())
            .await
            .map_err(|e| CliError::io("serve", e))
    })
}
