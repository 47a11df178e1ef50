/**
 * Pressure-to-color mapping for pocket rendering.
 *
 * The ramp is anchored at the pocket baseline pressure (calm blue) and the
 * controller's contact threshold (alert red); pressures in between blend
 * linearly, and anything at or past the threshold renders as the alert
 * color. Rendered pocket colors must be exactly what this function returns
 * for the snapshot's pressure: the renderer never adjusts them.
 */

export const BASELINE_PRESSURE_KPA = 0.4;
export const CONTACT_THRESHOLD_KPA = 1.01;

const CALM_HUE = 210; // blue
const ALERT_HUE = 4; // red

export function pressureColor(
  gaugePressureKpa: number,
  baselineKpa: number = BASELINE_PRESSURE_KPA,
  thresholdKpa: number = CONTACT_THRESHOLD_KPA,
): string {
  const span = thresholdKpa - baselineKpa;
  const raw = span > 0 ? (gaugePressureKpa - baselineKpa) / span : 1;
  const level = Math.min(Math.max(raw, 0), 1);
  const hue = CALM_HUE + (ALERT_HUE - CALM_HUE) * level;
  const lightness = 62 - 12 * level;
  return `hsl(${hue.toFixed(1)}, 85%, ${lightness.toFixed(1)}%)`;
}

/** Color used for the unexposed remainder of a pocket. */
export const UNEXPOSED_COLOR = "hsl(210, 8%, 38%)";
