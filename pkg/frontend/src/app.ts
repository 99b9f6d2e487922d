// Controller: owns the state, talks to the ApiClient, and re-renders by
// invoking the subscriber after every state change. All writes go through
// the documented endpoints and the affected collection is re-fetched
// afterwards (no optimistic rows).

import { ApiClient } from './api.js'
import {
  ViewState,
  Tab,
  initialState,
  switchTab,
  validateProductForm,
} from './state.js'

export class App {
  state: ViewState = initialState()
  private listeners: ((s: ViewState) => void)[] = []
  // per-resource queues: a submission waits for the prior request to the
  // same resource; sync additionally refuses to overlap itself
  private queues = new Map<string, Promise<void>>()

  constructor(private api: ApiClient) {}

  subscribe(fn: (s: ViewState) => void): void {
    this.listeners.push(fn)
  }

  private set(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch }
    for (const fn of this.listeners) fn(this.state)
  }

  private enqueue(resource: string, task: () => Promise<void>): Promise<void> {
    const prior = this.queues.get(resource) ?? Promise.resolve()
    const next = prior.then(task, task)
    this.queues.set(resource, next)
    return next
  }

  async refreshAll(): Promise<void> {
    const [categories, products, list] = await Promise.all([
      this.api.getCategories(),
      this.api.getProducts(),
      this.api.getList(),
    ])
    this.set({ categories, products, list })
  }

  setTab(tab: Tab): void {
    this.set(switchTab(this.state, tab))
  }

  setCategoryName(name: string): void {
    this.set({ categoryForm: { name } })
  }

  patchProductForm(patch: Partial<ViewState['productForm']>): void {
    this.set({ productForm: { ...this.state.productForm, ...patch } })
  }

  setFavoritesOnly(on: boolean): void {
    this.set({ favoritesOnly: on })
  }

  setRemoteUrl(url: string): void {
    this.set({ remoteUrl: url })
  }

  submitCategory(): Promise<void> {
    return this.enqueue('categories', async () => {
      const name = this.state.categoryForm.name.trim()
      if (!name) {
        this.set({ formError: 'name must not be empty' })
        return
      }
      try {
        await this.api.addCategory(name)
        this.set({
          categories: await this.api.getCategories(),
          categoryForm: { name: '' },
          formError: null,
        })
      } catch (e) {
        this.set({ formError: String((e as Error).message) })
      }
    })
  }

  submitProduct(): Promise<void> {
    const error = validateProductForm(this.state.productForm)
    if (error) {
      // invalid input never reaches the wire
      this.set({ formError: error })
      return Promise.resolve()
    }
    return this.enqueue('products', async () => {
      const form = this.state.productForm
      try {
        await this.api.addProduct({
          name: form.name.trim(),
          price: form.price.trim(),
          category_id: form.categoryId === '' ? null : Number(form.categoryId),
          favorite: form.favorite,
        })
        this.set({
          products: await this.api.getProducts(),
          productForm: { name: '', price: '', categoryId: '', favorite: false },
          formError: null,
        })
      } catch (e) {
        this.set({ formError: String((e as Error).message) })
      }
    })
  }

  addToList(productId: number): Promise<void> {
    return this.enqueue('list', async () => {
      try {
        await this.api.addToList(productId)
        this.set({ list: await this.api.getList(), notice: null })
      } catch (e) {
        this.set({ notice: String((e as Error).message) })
      }
    })
  }

  toggleItem(itemId: number): Promise<void> {
    return this.enqueue('list', async () => {
      try {
        const updated = await this.api.checkItem(itemId)
        // recolor strictly from the server's bought flag
        this.set({
          list: this.state.list.map((e) =>
            e.id === itemId
              ? { ...e, bought: updated.bought, display_color: updated.display_color }
              : e,
          ),
          notice: null,
        })
      } catch (e) {
        this.set({ notice: String((e as Error).message) })
      }
    })
  }

  newList(): Promise<void> {
    return this.enqueue('list', async () => {
      await this.api.newList()
      this.set({ list: await this.api.getList() })
    })
  }

  runSync(): Promise<void> {
    if (this.state.syncStatus.kind === 'running') return Promise.resolve()
    this.set({ syncStatus: { kind: 'running' } })
    return (async () => {
      try {
        const report = await this.api.sync(this.state.remoteUrl)
        this.set({ syncStatus: { kind: 'done', report } })
        await this.refreshAll()
      } catch (e) {
        this.set({ syncStatus: { kind: 'failed', message: String((e as Error).message) } })
      }
    })()
  }
}
