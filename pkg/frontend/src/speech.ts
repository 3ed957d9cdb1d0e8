/** Spoken output: a strictly ordered queue in front of a synthesizer.
 *
 * In the browser the synthesizer wraps speechSynthesis; tests substitute a
 * spy. The policy layer guarantees each assistant reply is voiced exactly
 * once, in the order messages arrive.
 */

import type { ReplyPayload, UtterancePayload, WireMessage } from "./protocol.js";
import type { Settings } from "./state.js";

export type Synthesizer = (text: string, rate: number) => void;

export class SpeechQueue {
  private queue: string[] = [];
  private draining = false;

  constructor(
    private readonly synth: Synthesizer,
    private readonly settings: Settings,
  ) {}

  enqueue(text: string): void {
    this.queue.push(text);
    this.drain();
  }

  private drain(): void {
    if (this.draining) return;
    this.draining = true;
    try {
      while (this.queue.length > 0) {
        const next = this.queue.shift() as string;
        this.synth(next, this.settings.speechRate);
      }
    } finally {
      this.draining = false;
    }
  }
}

/** Text a server message owes the speaker, or null for silent frames. */
export function speechForMessage(msg: WireMessage): string | null {
  switch (msg.type) {
    case "reply":
      return (msg.payload as ReplyPayload).text;
    case "utterance":
      return (msg.payload as UtterancePayload).text;
    case "error":
      return `Error: ${(msg.payload as { reason: string }).reason}`;
    default:
      return null;
  }
}

/** Voice one incoming message; returns true when something was spoken. */
export function speakMessage(queue: SpeechQueue, msg: WireMessage): boolean {
  const text = speechForMessage(msg);
  if (text === null) return false;
  queue.enqueue(text);
  return true;
}
