/** Parsing for the sweep CSV emitted by the simulator. */

export const SER_CSV_HEADER =
  "detector,snr_db,adc_bits,ser,symbol_errors,symbols_tested,wall_time_s";

export interface SerRecord {
  detector: string;
  snrDb: number;
  /** ADC resolution in bits; null for a perfect (unquantized) front end. */
  adcBits: number | null;
  ser: number;
  symbolErrors: number;
  symbolsTested: number;
  wallTimeS: number;
}

function num(field: string, value: string, line: number): number {
  const parsed = Number(value);
  if (value === "" || Number.isNaN(parsed)) {
    throw new Error(`line ${line}: ${field} is not a number: ${JSON.stringify(value)}`);
  }
  return parsed;
}

export function parseSerCsv(text: string): SerRecord[] {
  const lines = text.split("\n");
  if ((lines[0] ?? "").trim() !== SER_CSV_HEADER) {
    throw new Error(`line 1: expected header ${JSON.stringify(SER_CSV_HEADER)}`);
  }
  const records: SerRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = (lines[i] ?? "").trim();
    if (line === "") continue;
    const parts = line.split(",");
    if (parts.length !== 7) {
      throw new Error(`line ${i + 1}: expected 7 fields, got ${parts.length}`);
    }
    const [detector, snr, adc, ser, errors, tested, wall] = parts as [
      string, string, string, string, string, string, string,
    ];
    const lineNo = i + 1;
    const record: SerRecord = {
      detector,
      snrDb: num("snr_db", snr, lineNo),
      adcBits: adc === "Perfect" ? null : Math.trunc(num("adc_bits", adc, lineNo)),
      ser: num("ser", ser, lineNo),
      symbolErrors: num("symbol_errors", errors, lineNo),
      symbolsTested: num("symbols_tested", tested, lineNo),
      wallTimeS: num("wall_time_s", wall, lineNo),
    };
    if (record.ser < 0 || record.ser > 1) {
      throw new Error(`line ${lineNo}: ser ${record.ser} outside [0, 1]`);
    }
    if (record.symbolsTested < 1) {
      throw new Error(`line ${lineNo}: symbols_tested must be positive`);
    }
    records.push(record);
  }
  if (records.length === 0) {
    throw new Error("CSV contains no data rows");
  }
  return records;
}

export function adcLabel(bits: number | null): string {
  return bits === null ? "Perfect" : `${bits}-bit`;
}
