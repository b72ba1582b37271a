/**
 * CSV plumbing matching the conventions of the wrapped CLI exactly:
 * minimal quoting (a field is quoted only when it contains a comma, a
 * double quote, or a line break), doubled inner quotes, and "\n" line
 * endings. serializeTable(parseCsv(text)) reproduces such a document
 * byte for byte.
 */

/** A plain rectangular table: a header plus string-valued rows. */
export interface Table {
  columns: string[];
  rows: string[][];
}

function needsQuoting(field: string): boolean {
  return (
    field.includes(",") ||
    field.includes('"') ||
    field.includes("\n") ||
    field.includes("\r")
  );
}

function serializeField(field: string): string {
  if (!needsQuoting(field)) {
    return field;
  }
  return '"' + field.replaceAll('"', '""') + '"';
}

function serializeLine(fields: string[]): string {
  return fields.map(serializeField).join(",") + "\n";
}

/** Render a table as CSV text with a header line. */
export function serializeTable(table: Table): string {
  let out = serializeLine(table.columns);
  for (const row of table.rows) {
    out += serializeLine(row);
  }
  return out;
}

/** Parse CSV text (quoted fields allowed) into a header and rows. */
export function parseCsv(text: string): Table {
  const lines: string[][] = [];
  let field = "";
  let current: string[] = [];
  let inQuotes = false;
  let sawAnything = false;

  const endField = () => {
    current.push(field);
    field = "";
  };
  const endLine = () => {
    endField();
    lines.push(current);
    current = [];
  };

  for (let i = 0; i < text.length; i++) {
    const ch = text[i];
    sawAnything = true;
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          inQuotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch === '"') {
      inQuotes = true;
    } else if (ch === ",") {
      endField();
    } else if (ch === "\n") {
      endLine();
    } else if (ch === "\r") {
      if (text[i + 1] === "\n") {
        i++;
      }
      endLine();
    } else {
      field += ch;
    }
  }
  if (inQuotes) {
    throw new Error("malformed CSV: unterminated quoted field");
  }
  if (field.length > 0 || current.length > 0) {
    endLine(); // final line without a trailing newline
  }

  if (!sawAnything || lines.length === 0) {
    throw new Error("malformed CSV: no header line");
  }
  const [columns, ...rows] = lines;
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new Error(
        `malformed CSV: expected ${columns.length} fields, got ${row.length}`,
      );
    }
  }
  return { columns, rows };
}
