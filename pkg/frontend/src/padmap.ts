// Screen <-> virtual-touchpad coordinate mapping.
//
// The on-screen pad rectangle maps affinely onto the 2560x1440 panel.
// Points outside the rectangle still map (to out-of-range panel pixels);
// the engine treats those as off-screen, so a drag that leaves the pad is
// forwarded rather than clamped and cancels the gesture exactly like the
// real device would.

export const PANEL_WIDTH = 2560;
export const PANEL_HEIGHT = 1440;

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export class PadViewport {
  constructor(public rect: Rect) {
    if (rect.width <= 0 || rect.height <= 0) {
      throw new Error("pad viewport must have positive size");
    }
  }

  toPanel(sx: number, sy: number): { x: number; y: number; offScreen: boolean } {
    const x = Math.floor(((sx - this.rect.x) / this.rect.width) * PANEL_WIDTH);
    const y = Math.floor(((sy - this.rect.y) / this.rect.height) * PANEL_HEIGHT);
    const offScreen = x < 0 || x >= PANEL_WIDTH || y < 0 || y >= PANEL_HEIGHT;
    return { x, y, offScreen };
  }

  toScreen(px: number, py: number): { x: number; y: number } {
    return {
      x: this.rect.x + ((px + 0.5) / PANEL_WIDTH) * this.rect.width,
      y: this.rect.y + ((py + 0.5) / PANEL_HEIGHT) * this.rect.height,
    };
  }
}
