/** Typing echo: each printable keystroke is voiced as it lands, and the
 * word just finished is voiced again when a boundary character ends it.
 * Typing "hi " therefore speaks "h", "i", "hi".
 */

const WORD_BOUNDARIES = new Set([" ", "\t", ".", ",", "!", "?", ";", ":"]);

export class EchoBuffer {
  private chars: string[] = [];

  /** Text typed so far, as the input field would show it. */
  get value(): string {
    return this.chars.join("");
  }

  reset(): void {
    this.chars = [];
  }

  /** Feed one keystroke; returns the utterances it earns, in speaking order. */
  keystroke(key: string): string[] {
    if (key === "Backspace") {
      this.chars.pop();
      return ["backspace"];
    }
    if (key === "Enter") {
      // Leaves value intact: the owner reads it, submits, then reset()s.
      const finished = this.currentWord();
      return finished ? [finished] : [];
    }
    if (key.length !== 1) return [];
    if (WORD_BOUNDARIES.has(key)) {
      const finished = this.currentWord();
      this.chars.push(key);
      return finished ? [finished] : [];
    }
    this.chars.push(key);
    return [key];
  }

  /** Chars after the last boundary; survives backspacing across words. */
  private currentWord(): string {
    let start = this.chars.length;
    while (start > 0 && !WORD_BOUNDARIES.has(this.chars[start - 1])) {
      start -= 1;
    }
    return this.chars.slice(start).join("");
  }
}
