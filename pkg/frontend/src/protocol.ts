// Chat-channel frame types plus a validator driven by the shared JSON
// schema (schema/wire_schema.json at the repository root). Every outgoing
// frame is checked against that file before it leaves the client.

export type Stance = "pro" | "con";
export type FilterStance = Stance | "off";

export interface Provenance {
  argument_id?: string;
  selection_rank?: number;
  edited?: boolean;
  pgen?: number;
  mode?: "wizard" | "argu_bot" | "control";
  stance?: Stance;
}

export interface SuggestionItem {
  argument_id: string;
  text: string;
  stance: Stance;
  final_score: number;
  rank: number;
}

export type ClientFrame =
  | { type: "utterance"; seq?: number; session_id?: string; text: string; provenance?: Provenance }
  | { type: "search"; seq?: number; session_id?: string; terms: string[] }
  | { type: "filter"; seq?: number; session_id?: string; stance: FilterStance }
  | { type: "select"; seq?: number; session_id?: string; argument_id: string; rank: number }
  | { type: "close"; seq?: number; session_id?: string; force?: boolean };

export type ServerFrame =
  | { type: "ack"; seq?: number; session_id?: string; turn_index?: number }
  | { type: "utterance"; seq?: number; session_id?: string; text: string }
  | { type: "suggestions"; seq?: number; session_id?: string; items: SuggestionItem[] }
  | {
      type: "phase";
      seq?: number;
      session_id?: string;
      value: "created" | "pre_done" | "chatting" | "closed" | "post_done";
      elapsed_seconds?: number;
      min_remaining_seconds?: number;
      max_seconds?: number;
    }
  | { type: "error"; seq?: number; session_id?: string; code: string; detail?: string }
  | { type: "superseded"; seq?: number; session_id?: string };

// ---------------------------------------------------------------------------
// Minimal JSON-schema-subset checker: enough for the shared wire schema
// (type/const/enum/required/properties/additionalProperties/items/$ref/
// minimum/maxItems/minItems/minLength).
// ---------------------------------------------------------------------------

type Schema = Record<string, any>;

export class WireSchema {
  constructor(private readonly root: Schema) {}

  private resolve(node: Schema): Schema {
    if (node.$ref) {
      const path = (node.$ref as string).replace(/^#\//, "").split("/");
      let target: any = this.root;
      for (const key of path) target = target[key];
      return this.resolve(target);
    }
    return node;
  }

  private check(value: unknown, node: Schema, where: string, errors: string[]): void {
    node = this.resolve(node);
    if ("const" in node && value !== node.const) {
      errors.push(`${where}: expected ${JSON.stringify(node.const)}`);
      return;
    }
    if (node.enum && !node.enum.includes(value)) {
      errors.push(`${where}: ${JSON.stringify(value)} not in ${JSON.stringify(node.enum)}`);
      return;
    }
    switch (node.type) {
      case "object": {
        if (typeof value !== "object" || value === null || Array.isArray(value)) {
          errors.push(`${where}: expected object`);
          return;
        }
        const record = value as Record<string, unknown>;
        for (const key of node.required ?? []) {
          if (!(key in record)) errors.push(`${where}: missing required '${key}'`);
        }
        const properties: Schema = node.properties ?? {};
        for (const [key, inner] of Object.entries(record)) {
          if (key in properties) {
            this.check(inner, properties[key], `${where}.${key}`, errors);
          } else if (node.additionalProperties === false) {
            errors.push(`${where}: unexpected property '${key}'`);
          }
        }
        return;
      }
      case "array": {
        if (!Array.isArray(value)) {
          errors.push(`${where}: expected array`);
          return;
        }
        if (node.minItems !== undefined && value.length < node.minItems)
          errors.push(`${where}: fewer than ${node.minItems} items`);
        if (node.maxItems !== undefined && value.length > node.maxItems)
          errors.push(`${where}: more than ${node.maxItems} items`);
        if (node.items) {
          value.forEach((item, i) => this.check(item, node.items, `${where}[${i}]`, errors));
        }
        return;
      }
      case "string":
        if (typeof value !== "string") errors.push(`${where}: expected string`);
        else if (node.minLength !== undefined && value.length < node.minLength)
          errors.push(`${where}: shorter than ${node.minLength}`);
        return;
      case "integer":
        if (typeof value !== "number" || !Number.isInteger(value))
          errors.push(`${where}: expected integer`);
        else if (node.minimum !== undefined && value < node.minimum)
          errors.push(`${where}: below minimum ${node.minimum}`);
        else if (node.maximum !== undefined && value > node.maximum)
          errors.push(`${where}: above maximum ${node.maximum}`);
        return;
      case "number":
        if (typeof value !== "number") errors.push(`${where}: expected number`);
        else if (node.minimum !== undefined && value < node.minimum)
          errors.push(`${where}: below minimum ${node.minimum}`);
        return;
      case "boolean":
        if (typeof value !== "boolean") errors.push(`${where}: expected boolean`);
        return;
      default:
        return; // untyped nodes accept anything
    }
  }

  errorsFor(frame: Record<string, unknown>, side: "client" | "server"): string[] {
    const name = `${side}.${String(frame.type)}`;
    const definition = (this.root.definitions ?? {})[name];
    if (!definition) return [`no schema definition for frame type '${name}'`];
    const errors: string[] = [];
    this.check(frame, definition, name, errors);
    return errors;
  }

  assertValid(frame: Record<string, unknown>, side: "client" | "server"): void {
    const errors = this.errorsFor(frame, side);
    if (errors.length) {
      throw new Error(`invalid ${side} frame: ${errors.join("; ")}`);
    }
  }
}
