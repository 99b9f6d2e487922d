// View state for the four-tab app. Pure data + update helpers; rendering
// derives everything (including row colors) from here, never from the DOM.

import type { Category, ListEntry, MergeReportJson, Product } from './api.js'

export const TABS = ['category', 'product', 'new', 'list'] as const
export type Tab = (typeof TABS)[number]

export interface CategoryForm {
  name: string
}

export interface ProductForm {
  name: string
  price: string
  categoryId: string // raw select value, '' = uncategorized
  favorite: boolean
}

export type SyncStatus =
  | { kind: 'idle' }
  | { kind: 'running' }
  | { kind: 'done'; report: MergeReportJson }
  | { kind: 'failed'; message: string }

export interface ViewState {
  activeTab: Tab
  categories: Category[]
  products: Product[]
  list: ListEntry[]
  favoritesOnly: boolean
  // unsaved form input survives tab switches
  categoryForm: CategoryForm
  productForm: ProductForm
  formError: string | null
  notice: string | null
  syncStatus: SyncStatus
  remoteUrl: string
}

export function initialState(): ViewState {
  return {
    activeTab: 'category',
    categories: [],
    products: [],
    list: [],
    favoritesOnly: false,
    categoryForm: { name: '' },
    productForm: { name: '', price: '', categoryId: '', favorite: false },
    formError: null,
    notice: null,
    syncStatus: { kind: 'idle' },
    remoteUrl: '',
  }
}

export function switchTab(state: ViewState, tab: Tab): ViewState {
  return { ...state, activeTab: tab, formError: null }
}

export function visibleProducts(state: ViewState): Product[] {
  return state.favoritesOnly ? state.products.filter((p) => p.is_favorite) : state.products
}

// a price is a non-negative number with at most 4 decimal places
const PRICE_RE = /^\d+(\.\d{1,4})?$/

export function validateProductForm(form: ProductForm): string | null {
  if (!form.name.trim()) return 'name must not be empty'
  if (form.name.trim().length > 64) return 'name is too long'
  if (!PRICE_RE.test(form.price.trim())) return 'price must be a non-negative number'
  return null
}

export function syncLabel(status: SyncStatus): string {
  switch (status.kind) {
    case 'idle':
      return 'Sync'
    case 'running':
      return 'Syncing...'
    case 'done': {
      const r = status.report
      const applied = r.applied_local + r.applied_remote
      return `${applied} applied, ${r.conflicts.length} conflicts`
    }
    case 'failed':
      return `sync failed: ${status.message}`
  }
}
