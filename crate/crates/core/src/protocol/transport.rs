use std::io::{ErrorKind, Read, Write};
use std::sync::mpsc::{channel, Receiver, Sender};

use super::{read_message, write_message, Message, ProtocolError, WireError};

/// Bidirectional, ordered message channel between the two parties.
pub trait MessagePort {
    fn send(&mut self, msg: &Message) -> Result<(), ProtocolError>;
    fn recv(&mut self) -> Result<Message, ProtocolError>;
}

/// One end of an in-memory channel pair.
#[derive(Debug)]
pub struct InProcessPort {
    tx: Sender<Message>,
    rx: Receiver<Message>,
}

/// Two connected in-memory ports.
pub fn duplex() -> (InProcessPort, InProcessPort) {
    let (a_tx, b_rx) = channel();
    let (b_tx, a_rx) = channel();
    (
        InProcessPort { tx: a_tx, rx: a_rx },
        InProcessPort { tx: b_tx, rx: b_rx },
    )
}

impl InProcessPort {
    /// Next message if one is already queued.
    pub fn try_recv(&mut self) -> Option<Message> {
        self.rx.try_recv().ok()
    }
}

impl MessagePort for InProcessPort {
    fn send(&mut self, msg: &Message) -> Result<(), ProtocolError> {
        self.tx.send(msg.clone()).map_err(|_| ProtocolError::Disconnected)
    }

    fn recv(&mut self) -> Result<Message, ProtocolError> {
        self.rx.recv().map_err(|_| ProtocolError::Disconnected)
    }
}

/// Length-prefixed framing over any byte stream, e.g. a `TcpStream`.
#[derive(Debug)]
pub struct FramedPort<S> {
    stream: S,
}

impl<S: Read + Write> FramedPort<S> {
    pub fn new(stream: S) -> Self {
        FramedPort { stream }
    }

    pub fn into_inner(self) -> S {
        self.stream
    }
}

impl<S: Read + Write> MessagePort for FramedPort<S> {
    fn send(&mut self, msg: &Message) -> Result<(), ProtocolError> {
        write_message(&mut self.stream, msg).map_err(map_closed)
    }

    fn recv(&mut self) -> Result<Message, ProtocolError> {
        read_message(&mut self.stream).map_err(map_closed)
    }
}

fn map_closed(err: WireError) -> ProtocolError {
    match err {
        WireError::Io(e)
            if matches!(
                e.kind(),
                ErrorKind::UnexpectedEof | ErrorKind::BrokenPipe | ErrorKind::ConnectionReset
            ) =>
        {
            ProtocolError::Disconnected
        }
        other => ProtocolError::Wire(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::Reveal;
    use std::io::Cursor;

    #[test]
    fn duplex_delivers_in_order() {
        let (mut a, mut b) = duplex();
        a.send(&Message::Nack).unwrap();
        a.send(&Message::Ack).unwrap();
        assert_eq!(b.recv().unwrap(), Message::Nack);
        assert_eq!(b.recv().unwrap(), Message::Ack);
        assert!(b.try_recv().is_none());
        drop(a);
        assert!(matches!(b.recv(), Err(ProtocolError::Disconnected)));
    }

    #[test]
    fn framed_port_round_trip_and_eof() {
        let msg = Message::Reveal(Reveal {
            round: 2,
            entries: vec![(4, 1), (9, 0)],
        });
        let mut port = FramedPort::new(Cursor::new(Vec::new()));
        port.send(&msg).unwrap();
        let bytes = port.into_inner().into_inner();
        let mut port = FramedPort::new(Cursor::new(bytes));
        assert_eq!(port.recv().unwrap(), msg);
        assert!(matches!(port.recv(), Err(ProtocolError::Disconnected)));
    }
}
