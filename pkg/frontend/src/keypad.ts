// Keypad interaction rules: at most one key held, every down gets exactly
// one up, later presses are ignored while a key is held. A tap-latch mode
// (accessibility setting) turns taps into hold/release toggles.

export type KeyEmission =
  | { kind: "down"; key: string }
  | { kind: "up"; key: string };

export const KEYPAD_LAYOUT: string[][] = [
  ["1", "2", "3", "A"],
  ["4", "5", "6", "B"],
  ["7", "8", "9", "C"],
  ["*", "0", "#", "D"],
];

const ALL_KEYS = new Set(KEYPAD_LAYOUT.flat());

export class KeypadController {
  private held: string | null = null;
  tapLatch = false;

  get heldKey(): string | null {
    return this.held;
  }

  /** Pointer/keyboard press. Returns the messages to emit (possibly none). */
  press(key: string): KeyEmission[] {
    if (!ALL_KEYS.has(key)) return [];
    if (this.tapLatch) {
      if (this.held === key) {
        this.held = null;
        return [{ kind: "up", key }];
      }
      const out: KeyEmission[] = [];
      if (this.held !== null) out.push({ kind: "up", key: this.held });
      this.held = key;
      out.push({ kind: "down", key });
      return out;
    }
    if (this.held !== null) return []; // one key at a time
    this.held = key;
    return [{ kind: "down", key }];
  }

  /** Pointer/keyboard release. No-op in tap-latch mode or for other keys. */
  release(key: string): KeyEmission[] {
    if (this.tapLatch) return [];
    if (this.held !== key) return [];
    this.held = null;
    return [{ kind: "up", key }];
  }

  /** Blur, disconnect, mode switch: anything held must come back up. */
  forceRelease(): KeyEmission[] {
    if (this.held === null) return [];
    const key = this.held;
    this.held = null;
    return [{ kind: "up", key }];
  }

  setTapLatch(enabled: boolean): KeyEmission[] {
    if (this.tapLatch === enabled) return [];
    const out = this.forceRelease();
    this.tapLatch = enabled;
    return out;
  }
}
