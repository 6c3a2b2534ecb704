/**
 * Unsaved edit text, autosaved per item so a version conflict or an
 * accidental navigation never destroys reviewer work. Backed by
 * localStorage in the browser; falls back to an in-memory map when no
 * storage is available.
 */

export interface KeyValueStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStorage implements KeyValueStorage {
  private readonly map = new Map<string, string>();

  getItem(key: string): string | null {
    return this.map.has(key) ? (this.map.get(key) as string) : null;
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }
}

const PREFIX = "taidesk.editbuffer.";

export class EditBufferStore {
  constructor(private readonly storage: KeyValueStorage = new MemoryStorage()) {}

  load(itemId: string): string | null {
    return this.storage.getItem(PREFIX + itemId);
  }

  save(itemId: string, text: string): void {
    this.storage.setItem(PREFIX + itemId, text);
  }

  clear(itemId: string): void {
    this.storage.removeItem(PREFIX + itemId);
  }
}
