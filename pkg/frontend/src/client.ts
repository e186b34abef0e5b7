// Connection state machine. The socket is injected so tests can drive
// the client with a mock; the browser entry point passes a WebSocket.

import { encodeCommand, parseServerFrame, PROTOCOL_VERSION } from "./protocol.js";
import type { ClientState, CommandPayload } from "./types.js";

/** The subset of WebSocket the client needs. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
}

const TRAIL_CAP = 600;

export class SteerClient {
  readonly state: ClientState = {
    canal: null,
    lastState: null,
    status: "connecting",
    tickHz: 20,
    trail: [],
  };

  private socket: SocketLike | null = null;
  private sawHello = false;
  onChange: (() => void) | null = null;
  onProtocolError: ((detail: string) => void) | null = null;

  attach(socket: SocketLike): void {
    this.socket = socket;
    this.sawHello = false;
    this.state.status = "connecting";
    this.emitChange();
  }

  handleOpen(): void {
    // the server speaks first; stay "connecting" until hello arrives
  }

  handleMessage(raw: string): void {
    const frame = parseServerFrame(raw);
    if (frame === null) {
      this.onProtocolError?.(`unparseable frame: ${raw.slice(0, 80)}`);
      return;
    }
    switch (frame.kind) {
      case "hello":
        if (frame.payload.protocol_version !== PROTOCOL_VERSION) {
          this.onProtocolError?.(
            `protocol version ${frame.payload.protocol_version} unsupported`);
          this.socket?.close();
          return;
        }
        this.sawHello = true;
        this.state.tickHz = frame.payload.tick_hz;
        break;
      case "canal":
        if (!this.sawHello) {
          this.onProtocolError?.("canal before hello");
          return;
        }
        this.state.canal = frame.payload;
        this.state.trail = [];
        this.state.status = "connected";
        break;
      case "state":
        if (this.state.canal === null) {
          this.onProtocolError?.("state before canal");
          return;
        }
        this.state.lastState = frame.payload;
        this.state.trail.push(frame.payload.pose.p);
        if (this.state.trail.length > TRAIL_CAP) {
          this.state.trail.splice(0, this.state.trail.length - TRAIL_CAP);
        }
        break;
      case "error":
        this.onProtocolError?.(`server error ${frame.payload.code}: ${frame.payload.detail}`);
        break;
    }
    this.emitChange();
  }

  handleClose(): void {
    this.state.status = "disconnected";
    this.socket = null;
    this.emitChange();
  }

  /** Send a command; silently dropped unless connected (schema enforced). */
  send(cmd: CommandPayload): boolean {
    if (this.socket === null || this.state.status !== "connected") {
      return false;
    }
    this.socket.send(encodeCommand(cmd));
    return true;
  }

  /** Disk index shown in the UI: always the latest state frame's s. */
  get displayedDiskIndex(): number | null {
    return this.state.lastState?.s ?? null;
  }

  private emitChange(): void {
    this.onChange?.();
  }
}
