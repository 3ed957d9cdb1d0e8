/** Keyboard navigation: arrow keys move the player, WASD pans the view.
 *
 * Keys are swallowed while a text input has focus so typing a request never
 * steers the player.
 */

export interface NavMessage {
  type: "nav";
  kind: string;
  magnitude?: number;
}

const ARROW_TO_NAV: Record<string, string> = {
  ArrowUp: "move_forward",
  ArrowDown: "move_back",
  ArrowLeft: "strafe_left",
  ArrowRight: "strafe_right",
};

const PAN_TO_NAV: Record<string, string> = {
  w: "pan_up",
  a: "pan_left",
  s: "pan_down",
  d: "pan_right",
};

export const MOVE_STEP = 0.5;
export const PAN_STEP = 15;

export function navForKey(key: string, focusInTextInput: boolean): NavMessage | null {
  if (focusInTextInput) return null;
  const arrow = ARROW_TO_NAV[key];
  if (arrow) return { type: "nav", kind: arrow, magnitude: MOVE_STEP };
  const pan = PAN_TO_NAV[key.toLowerCase()];
  if (key.length === 1 && pan) return { type: "nav", kind: pan, magnitude: PAN_STEP };
  return null;
}
